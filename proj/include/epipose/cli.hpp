#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <spdlog/logger.h>

#include "epipose/encoder.hpp"
#include "epipose/error.hpp"
#include "epipose/sampling.hpp"

namespace epipose::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitGeometry = 3,
  kExitVerification = 4,
};

[[nodiscard]] int exit_code_for(ErrorKind kind) noexcept;

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Logger writing to `sink`, level taken from EPIPOSE_LOG (trace, debug, info,
/// warn, error, off; default warn).
[[nodiscard]] std::shared_ptr<spdlog::logger> make_logger(std::ostream& sink);

struct GridSpec {
  enum class Kind { Regular, Random } kind = Kind::Regular;
  int r = 15;
  double fraction = 0.01;
  std::uint64_t seed = 0;

  /// Grid for one pair. Random grids draw from pair_seed(seed, src, tgt) in
  /// batch mode so each pair gets fresh samples that are still replayable.
  [[nodiscard]] SampleGrid build(int height, int width) const;
  [[nodiscard]] SampleGrid build_for_pair(int height, int width, int source_id, int target_id) const;
};

/// splitmix64 of the base seed combined with the frame ids.
[[nodiscard]] std::uint64_t pair_seed(std::uint64_t seed, int source_id, int target_id);

enum class DatasetKind {
  /// Pose text file (one camera-to-world 3x4 per line) plus NNNNNN.png frames.
  Kitti,
  /// Directory of NNNNNN.png frames each with an NNNNNN.json camera config.
  Config,
};

struct JobSpec {
  DatasetKind dataset = DatasetKind::Kitti;
  std::filesystem::path images;
  std::filesystem::path poses;
  std::optional<std::filesystem::path> intrinsics;
  std::filesystem::path output_dir;
  std::string sequence;
  int max_gap = 10;
  GridSpec grid;
  EncodeOptions options;
  bool png = false;
  int workers = 1;
};

/// Ordered (source, target) id pairs with 1 <= |source - target| <= max_gap,
/// both directions, sorted by source then target.
[[nodiscard]] std::vector<std::pair<int, int>> frame_pairs(const std::vector<int>& ids, int max_gap);

[[nodiscard]] std::string output_name(const std::string& sequence, int source_id, int target_id);

struct BatchSummary {
  std::size_t pairs = 0;
  std::size_t written = 0;
  std::size_t skipped = 0;
  std::vector<std::string> failures;
  int exit_code = kExitOk;
};

/// Encodes every pair of the job. Existing outputs are skipped, failures are
/// logged per item and summarised. Each pair is encoded single-threaded;
/// `workers` pairs run concurrently.
[[nodiscard]] BatchSummary run_batch(const JobSpec& job, spdlog::logger& log);

}  // namespace epipose::cli
