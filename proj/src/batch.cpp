#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <spdlog/logger.h>

#include "cli_support.hpp"
#include "epipose/cli.hpp"
#include "epipose/io.hpp"

namespace epipose::cli {

namespace {

struct Frame {
  int id = 0;
  std::filesystem::path image;
  std::optional<Extrinsic> pose;
  std::optional<CameraConfig> config;
  std::string load_error;  // non-empty when the frame's pose could not be read
  ErrorKind load_error_kind = ErrorKind::ParseError;
};

std::filesystem::path frame_image(const std::filesystem::path& dir, int id) {
  return dir / fmt::format("{:06d}.png", id);
}

std::vector<Frame> load_frames(const JobSpec& job) {
  std::vector<Frame> frames;
  if (job.dataset == DatasetKind::Kitti) {
    const PoseSequence seq = load_kitti_poses(job.poses);
    for (std::size_t i = 0; i < seq.frames.size(); ++i)
      frames.push_back({seq.frame_ids[i], frame_image(job.images, seq.frame_ids[i]), seq.frames[i],
                        std::nullopt, {}, {}});
    return frames;
  }

  if (!std::filesystem::is_directory(job.images))
    throw Error(ErrorKind::IoError, fmt::format("'{}' is not a directory", job.images.string()));
  for (const auto& entry : std::filesystem::directory_iterator(job.images)) {
    if (entry.path().extension() != ".json") continue;
    const std::string stem = entry.path().stem().string();
    int id = -1;
    auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), id);
    if (ec != std::errc{} || ptr != stem.data() + stem.size() || id < 0) continue;
    Frame frame{id, frame_image(job.images, id), std::nullopt, std::nullopt, {}, {}};
    try {
      frame.config = load_camera_config(entry.path());
      if (!frame.config->pose)
        throw Error(ErrorKind::MissingField, fmt::format("{}: no R/t pose", entry.path().string()));
      frame.pose = frame.config->pose;
    } catch (const Error& e) {
      frame.load_error = e.message();
      frame.load_error_kind = e.kind();
    }
    frames.push_back(std::move(frame));
  }
  std::sort(frames.begin(), frames.end(), [](const Frame& a, const Frame& b) { return a.id < b.id; });
  return frames;
}

struct ItemOutcome {
  enum class State { Written, Skipped, Failed } state = State::Failed;
  std::string message;
  ErrorKind kind = ErrorKind::InvalidArgument;
};

}  // namespace

std::vector<std::pair<int, int>> frame_pairs(const std::vector<int>& ids, int max_gap) {
  std::vector<int> sorted = ids;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<int, int>> pairs;
  for (int s : sorted)
    for (int t : sorted) {
      const int gap = s > t ? s - t : t - s;
      if (gap >= 1 && gap <= max_gap) pairs.emplace_back(s, t);
    }
  return pairs;
}

std::string output_name(const std::string& sequence, int source_id, int target_id) {
  return fmt::format("{}_{:06d}_{:06d}.ept", sequence, source_id, target_id);
}

BatchSummary run_batch(const JobSpec& job, spdlog::logger& log) {
  if (job.workers < 1) throw Error(ErrorKind::InvalidArgument, "worker count must be >= 1");
  if (job.max_gap < 1) throw Error(ErrorKind::InvalidArgument, "max frame gap must be >= 1");
  if (job.dataset == DatasetKind::Kitti && !job.intrinsics)
    throw Error(ErrorKind::MissingField, "KITTI batches need --intrinsics");

  std::optional<CameraConfig> shared_k;
  if (job.intrinsics) shared_k = load_camera_config(*job.intrinsics);

  const std::vector<Frame> frames = load_frames(job);
  std::vector<int> ids;
  for (const Frame& f : frames) ids.push_back(f.id);
  const auto pairs = frame_pairs(ids, job.max_gap);
  auto frame_by_id = [&](int id) -> const Frame& {
    return *std::find_if(frames.begin(), frames.end(), [id](const Frame& f) { return f.id == id; });
  };

  std::string sequence = job.sequence;
  if (sequence.empty())
    sequence = job.dataset == DatasetKind::Kitti ? job.poses.stem().string()
                                                 : job.images.filename().string();

  std::filesystem::create_directories(job.output_dir);
  std::mutex progress_mutex;
  std::ofstream progress(job.output_dir / "batch.log", std::ios::app);
  auto record = [&](const std::string& line) {
    std::lock_guard lock(progress_mutex);
    progress << line << '\n';
    progress.flush();
  };

  std::vector<ItemOutcome> outcomes(pairs.size());
  auto process = [&](std::size_t index) {
    const auto [src_id, tgt_id] = pairs[index];
    const std::string name = output_name(sequence, src_id, tgt_id);
    const auto target_path = job.output_dir / name;
    ItemOutcome& outcome = outcomes[index];
    if (std::filesystem::exists(target_path)) {
      outcome.state = ItemOutcome::State::Skipped;
      record("skip " + name);
      return;
    }
    try {
      const Frame& src = frame_by_id(src_id);
      const Frame& tgt = frame_by_id(tgt_id);
      for (const Frame* f : {&src, &tgt})
        if (!f->load_error.empty()) throw Error(f->load_error_kind, f->load_error);

      const ImageBuffer source = detail::load_source_image(src.image);
      const int H = source.height(), W = source.width();
      const Intrinsics Ks = detail::fit_to_image(shared_k ? *shared_k : *src.config, W, H);
      const Intrinsics Kt = detail::fit_to_image(shared_k ? *shared_k : *tgt.config, W, H);
      const SampleGrid grid = job.grid.build_for_pair(H, W, src_id, tgt_id);
      const EncodedPose pose = encode_views(source, Ks, Kt, *src.pose, *tgt.pose, grid, job.options);

      auto tmp = target_path;
      tmp += ".tmp";
      write_tensor(pose, tmp);
      std::filesystem::rename(tmp, target_path);
      if (job.png) {
        auto png_path = target_path;
        png_path.replace_extension(".png");
        (void)write_encoding_png(pose, png_path);
      }
      if (pose.status == EncodeStatus::Empty) log.warn("{}: empty encoding", name);
      outcome.state = ItemOutcome::State::Written;
      record("ok " + name);
    } catch (const Error& e) {
      outcome = {ItemOutcome::State::Failed, e.message(), e.kind()};
      log.error("{}: {}", name, e.what());
      record(fmt::format("fail {}: {}", name, e.what()));
    } catch (const std::exception& e) {
      outcome = {ItemOutcome::State::Failed, e.what(), ErrorKind::IoError};
      log.error("{}: {}", name, e.what());
      record(fmt::format("fail {}: {}", name, e.what()));
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < pairs.size(); i = next.fetch_add(1)) process(i);
  };
  {
    const int count = std::max(1, std::min<int>(job.workers, int(pairs.size())));
    std::vector<std::jthread> pool;
    for (int w = 1; w < count; ++w) pool.emplace_back(worker);
    worker();
  }

  BatchSummary summary;
  summary.pairs = pairs.size();
  bool only_geometric = true;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const ItemOutcome& o = outcomes[i];
    switch (o.state) {
      case ItemOutcome::State::Written: ++summary.written; break;
      case ItemOutcome::State::Skipped: ++summary.skipped; break;
      case ItemOutcome::State::Failed:
        summary.failures.push_back(
            fmt::format("{}: {}", output_name(sequence, pairs[i].first, pairs[i].second), o.message));
        only_geometric = only_geometric && exit_code_for(o.kind) == kExitGeometry;
        break;
    }
  }
  if (!summary.failures.empty()) summary.exit_code = only_geometric ? kExitGeometry : kExitData;
  return summary;
}

}  // namespace epipose::cli
