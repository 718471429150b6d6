// Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "epipose/cli.hpp"
#include "epipose/encoder.hpp"
#include "epipose/error.hpp"
#include "epipose/io.hpp"
#include "epipose/metrics.hpp"
#include "epipose/raster.hpp"
#include "epipose/sampling.hpp"
#include "epipose/spectral.hpp"
#include "epipose/verify.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace {

using namespace epipose;
using synthetic::Rng;
namespace fs = std::filesystem;

// Tolerances and budgets.
constexpr double kResidualTol = 1e-6;
constexpr double kRankTol = 1e-7;
constexpr double kKernelSumTol = 1e-12;
constexpr double kReconstructionTol = 1e-12;
constexpr double kSeparableTol = 1e-10;
constexpr double kOffsetLossTol = 1e-24;
constexpr double kSsimClosedFormTol = 1e-9;
constexpr double kSsimIdentityTol = 1e-12;
constexpr double kTotalBudgetSeconds = 120.0;

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool condition, const std::string& what) {
    if (!condition && ok) detail = what;
    ok = ok && condition;
  }
};

int g_failures = 0;

void criterion(const std::string& name, double budget_seconds, const std::function<Check()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Check result;
  try {
    result = body();
  } catch (const std::exception& e) {
    result.ok = false;
    result.detail = fmt::format("exception: {}", e.what());
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (result.ok && elapsed > budget_seconds) {
    result.ok = false;
    result.detail = fmt::format("took {:.2f} s, budget {:.0f} s", elapsed, budget_seconds);
  }
  if (!result.ok) ++g_failures;
  fmt::print("{} {:<22} {:7.3f} s  {}\n", result.ok ? "PASS" : "FAIL", name, elapsed, result.detail);
  std::fflush(stdout);
}

struct CliResult {
  int code;
  std::string out;
};

CliResult cli_run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str() + err.str()};
}

bool has_line(const std::string& text, const std::string& line) {
  return ("\n" + text).find("\n" + line + "\n") != std::string::npos;
}

Check grid_cardinality() {
  Check c;
  for (auto [r, n] : {std::pair{15, 225u}, {20, 400u}, {25, 625u}}) {
    const auto g = grid_samples(256, 256, r);
    c.expect(g.size() == n, fmt::format("grid r={} gave {}", r, g.size()));
  }
  for (std::uint64_t seed : {0ull, 1ull, 2ull, 12345ull, ~0ull}) {
    const auto g = random_samples(256, 256, 0.01, seed);
    c.expect(g.size() == 655u, fmt::format("random seed {} gave {}", seed, g.size()));
  }
  c.detail = c.ok ? "225/400/625 regular, 655 random" : c.detail;
  return c;
}

Check epipolar_oracle() {
  Check c;
  Rng rng(20240601);
  double worst_residual = 0.0, worst_rank = 0.0;
  for (int pair_index = 0; pair_index < 200; ++pair_index) {
    const auto pair = synthetic::random_camera_pair(rng, 1e-3);
    const auto rel = relative_motion(pair.source, pair.target);
    c.expect(rel.translation().norm() > 1e-3, "baseline below 1e-3");
    const auto F = fundamental_matrix(pair.source_k, pair.target_k, rel);
    Eigen::JacobiSVD<Mat3> svd(F.matrix());
    worst_rank = std::max(worst_rank, svd.singularValues()(2) / svd.singularValues()(0));
    int done = 0;
    while (done < 50) {
      const Vec3 X = synthetic::random_point_in_view(rng, pair);
      std::array<double, 2> ps{}, pt{};
      if (!oracle::project(pair.source_k.matrix(), pair.source.rotation(), pair.source.translation(), X, ps) ||
          !oracle::project(pair.target_k.matrix(), pair.target.rotation(), pair.target.translation(), X, pt))
        continue;
      worst_residual = std::max(worst_residual, oracle::normalized_residual(F.matrix(), ps, pt));
      ++done;
    }
  }
  c.expect(worst_residual <= kResidualTol, fmt::format("residual {:.3e}", worst_residual));
  c.expect(worst_rank <= kRankTol, fmt::format("rank ratio {:.3e}", worst_rank));
  if (c.ok) c.detail = fmt::format("max residual {:.2e}, max rank ratio {:.2e}", worst_residual, worst_rank);
  return c;
}

Check raster_oracle() {
  Check c;
  Rng rng(7);
  std::uniform_real_distribution<double> angle(0.0, M_PI), pos(-0.5, 255.5), scale(0.01, 100.0);
  double worst = 0.0;
  int mismatched = 0;
  for (int i = 0; i < 500; ++i) {
    const double theta = angle(rng), s = scale(rng), x0 = pos(rng), y0 = pos(rng);
    const Vec3 l(s * std::cos(theta), s * std::sin(theta), -s * (std::cos(theta) * x0 + std::sin(theta) * y0));
    const auto seg = clip_line(l, 256, 256);
    if (!seg) {
      ++mismatched;
      continue;
    }
    const auto pixels = rasterize(*seg);
    if (pixels != oracle::raster_scan(l, 256, 256)) ++mismatched;
    for (const Pixel& p : pixels) worst = std::max(worst, line_distance(l, p.x, p.y));
  }
  c.expect(mismatched == 0, fmt::format("{} of 500 lines differ from the scan", mismatched));
  c.expect(worst <= std::sqrt(2.0) / 2.0, fmt::format("distance {:.4f}", worst));
  if (c.ok) c.detail = fmt::format("500 lines identical to scan, max distance {:.4f}", worst);
  return c;
}

struct Scene {
  fs::path image, src_json, tgt_json;
};

Scene write_scene(Rng& rng, const fs::path& dir, int index) {
  const auto pair = synthetic::random_camera_pair(rng, 0.05);
  Scene s{dir / fmt::format("s{}.png", index), dir / fmt::format("s{}_a.json", index),
          dir / fmt::format("s{}_b.json", index)};
  write_png(synthetic::random_image_8bit(rng, 256, 256), s.image);
  synthetic::write_text(s.src_json, synthetic::camera_json(pair.source_k, &pair.source));
  synthetic::write_text(s.tgt_json, synthetic::camera_json(pair.target_k, &pair.target));
  return s;
}

Check encoding_self_check() {
  Check c;
  synthetic::TempDir dir("acceptance_enc");
  Rng rng(99);
  int checked = 0;
  for (int i = 0; i < 50; ++i) {
    const Scene scene = write_scene(rng, dir.path(), i);
    const std::vector<std::string> view{"--source", scene.image.string(), "--src-pose", scene.src_json.string(),
                                        "--tgt-pose", scene.tgt_json.string()};
    std::vector<std::string> mode;
    switch (i % 4) {
      case 0: mode = {"--grid", "15"}; break;
      case 1: mode = {"--grid", "25"}; break;
      case 2: mode = {"--random-frac", "0.01", "--seed", std::to_string(1000 + i)}; break;
      default: mode = {"--grid", "20", "--extended"}; break;
    }
    const fs::path first = dir / fmt::format("e{}_1.ept", i), second = dir / fmt::format("e{}_2.ept", i);
    for (const fs::path& out : {first, second}) {
      std::vector<std::string> args{"encode"};
      args.insert(args.end(), view.begin(), view.end());
      args.insert(args.end(), mode.begin(), mode.end());
      args.insert(args.end(), {"--out", out.string()});
      const CliResult r = cli_run(args);
      c.expect(r.code == 0, fmt::format("encode {} exit {}: {}", i, r.code, r.out));
    }
    c.expect(read_text_file(first) == read_text_file(second), fmt::format("encoding {} not reproducible", i));

    std::vector<std::string> check{"check"};
    check.insert(check.end(), view.begin(), view.end());
    check.insert(check.end(), {"--tensor", first.string()});
    const CliResult r = cli_run(check);
    c.expect(r.code == 0 && has_line(r.out, "result=pass") && has_line(r.out, "violations=0") &&
                 has_line(r.out, "mismatches=0"),
             fmt::format("check {} exit {}: {}", i, r.code, r.out.substr(0, 300)));
    if (!has_line(r.out, "nonzero_pixels=0")) ++checked;
    if (!c.ok) return c;
  }

  // A whole sequence through the batch runner with 1 and 8 workers.
  const fs::path seq = dir / "seq";
  fs::create_directories(seq);
  Rng seq_rng(5);
  const auto poses = synthetic::driving_sequence(12);
  const Intrinsics K(220, 220, 127.5, 127.5);
  for (int i = 0; i < 12; ++i) {
    write_png(synthetic::random_image_8bit(seq_rng, 256, 256), seq / fmt::format("{:06d}.png", i));
    synthetic::write_text(seq / fmt::format("{:06d}.json", i), synthetic::camera_json(K, &poses[std::size_t(i)]));
  }
  for (const std::string workers : {"1", "8"}) {
    const CliResult r = cli_run({"batch", "--dataset", "config", "--images", seq.string(), "--max-gap", "2",
                                 "--workers", workers, "--random-frac", "0.01", "--seed", "3", "--extended",
                                 "--out", (dir / ("w" + workers)).string()});
    c.expect(r.code == 0 && has_line(r.out, "pairs=42 written=42 skipped=0 failed=0"),
             fmt::format("batch with {} workers: {}", workers, r.out));
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(dir / "w1")) {
    if (entry.path().extension() != ".ept") continue;
    c.expect(read_text_file(entry.path()) == read_text_file(dir / "w8" / entry.path().filename()),
             fmt::format("{} differs between worker counts", entry.path().filename().string()));
    ++compared;
  }
  c.expect(compared == 42, fmt::format("compared {} batch outputs", compared));
  if (c.ok)
    c.detail = fmt::format("50 encodings pass check ({} non-empty), reproducible; 42 batch outputs equal for 1/8 workers",
                           checked);
  return c;
}

Check extended_channel() {
  Check c;
  Rng rng(31);
  for (int i = 0; i < 50; ++i) {
    const auto pair = synthetic::random_camera_pair(rng, 0.05);
    const ImageBuffer source = synthetic::random_image(rng, 256, 256);
    EncodeOptions opts;
    opts.extended = true;
    const SampleGrid grid = i % 2 ? grid_samples(256, 256, 15) : random_samples(256, 256, 0.01, rng());
    const auto pose = encode_views(source, pair.source_k, pair.target_k, pair.source, pair.target, grid, opts);
    c.expect(pose.image.channels() == 4, "not four channels");
    std::size_t outside = 0;
    for (int y = 0; y < 256; ++y)
      for (int x = 0; x < 256; ++x) {
        const auto p = pose.image.pixel(y, x);
        if (p[3] != 0.0f && p[0] == 0.0f && p[1] == 0.0f && p[2] == 0.0f) ++outside;
        if (std::max({p[0], p[1], p[2]}) > 0.0f && p[3] != float(*pose.delta_t)) ++outside;
      }
    c.expect(outside == 0, fmt::format("encoding {}: {} pixels break the channel-4 rule", i, outside));
  }

  struct Case {
    Vec3 ts, tt;
    double delta;
  };
  const Case cases[] = {
      {{0, 0, 2}, {0, 0, 7}, 5.0},      // forward
      {{0, 0, 7}, {0, 0, 2}, -5.0},     // backward
      {{1, 0, 9}, {2, 0, 3}, -6.0},     // z dominates, shrinking
      {{2, 0, 3}, {1, 0, 9}, 6.0},      // reversed pair flips the sign
      {{1, -2, 3}, {1, -2, 3}, 0.0},    // no change
      {{0, 0, -2}, {0, 0, -7}, 5.0},    // magnitudes, not signed coordinates
      {{0, 4, 0}, {0, -1, 0.5}, -3.0},  // y dominates
  };
  for (const Case& k : cases) {
    const double got = extended_delta(k.ts, k.tt);
    c.expect(got == k.delta, fmt::format("delta(({}, {}, {}) -> ({}, {}, {})) = {}, want {}", k.ts.x(), k.ts.y(),
                                         k.ts.z(), k.tt.x(), k.tt.y(), k.tt.z(), got, k.delta));
  }
  if (c.ok) c.detail = "50 encodings obey the subset rule; 7 hand cases exact";
  return c;
}

double max_abs_diff(const ImageD& a, const ImageD& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

Check spectral_suite() {
  Check c;
  const auto k = gaussian_kernel(5);
  c.expect(k.mu == 2.0, fmt::format("mu = {}", k.mu));
  c.expect(std::abs(k.sigma - std::pow(5.0 / 6.0, 2.0)) <= 1e-15, fmt::format("sigma = {}", k.sigma));
  const double sum = std::accumulate(k.weights.begin(), k.weights.end(), 0.0);
  c.expect(std::abs(sum - 1.0) <= kKernelSumTol, fmt::format("kernel sum {:.17g}", sum));

  Rng rng(41);
  double worst_recon = 0.0, worst_offset = 0.0, worst_sep = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int H = 5 + int(rng() % 60), W = 5 + int(rng() % 60);
    const ImageD image = synthetic::random_image_d(rng, H, W, 3);
    const auto split = decompose(image, k);
    for (std::size_t j = 0; j < image.size(); ++j)
      worst_recon = std::max(worst_recon, std::abs(split.low.values()[j] + split.high.values()[j] - image.values()[j]));

    ImageD shifted = image;
    const double offset = synthetic::uniform(rng, -0.5, 0.5);
    for (double& v : shifted.values()) v += offset;
    worst_offset = std::max(worst_offset, spectral_loss(shifted, image, k));

    if (i < 20) {
      worst_sep = std::max(worst_sep, max_abs_diff(lowpass(image, k), lowpass_direct(image, k)));
      worst_sep = std::max(worst_sep, max_abs_diff(lowpass(image, k), oracle::convolve(image, 5)));
    }
  }
  c.expect(worst_recon <= kReconstructionTol, fmt::format("reconstruction error {:.3e}", worst_recon));
  c.expect(worst_offset <= kOffsetLossTol, fmt::format("offset spectral loss {:.3e}", worst_offset));
  c.expect(worst_sep <= kSeparableTol, fmt::format("separable vs direct {:.3e}", worst_sep));
  if (c.ok)
    c.detail = fmt::format("recon {:.1e}, offset loss {:.1e}, separable {:.1e}", worst_recon, worst_offset, worst_sep);
  return c;
}

Check metrics_suite() {
  Check c;
  Rng rng(51);
  for (int i = 0; i < 10; ++i) {
    const ImageBuffer a = synthetic::random_image(rng, 11 + int(rng() % 40), 11 + int(rng() % 40));
    c.expect(std::abs(ssim(a, a) - 1.0) <= kSsimIdentityTol, fmt::format("ssim(I,I) = {:.17g}", ssim(a, a)));
    c.expect(mae(a, a) == 0.0, "mae(I,I) != 0");
    c.expect(psnr(a, a) == kPsnrInfinite, "psnr(I,I) is not the infinite sentinel");
  }
  const double C1 = 0.01 * 0.01;
  const double closed = (2 * 0.25 * 0.75 + C1) / (0.25 * 0.25 + 0.75 * 0.75 + C1);
  const double s = ssim(ImageBuffer(32, 32, 3, 0.25f), ImageBuffer(32, 32, 3, 0.75f));
  c.expect(std::abs(s - closed) <= kSsimClosedFormTol, fmt::format("constant ssim {:.12f} vs {:.12f}", s, closed));
  c.expect(psnr_from_mse(0.01) == 20.0, fmt::format("psnr(0.01) = {:.17g}", psnr_from_mse(0.01)));
  if (c.ok) c.detail = fmt::format("constant ssim {:.12f}, psnr(0.01) = 20", s);
  return c;
}

Check formats_suite() {
  Check c;
  Rng rng(61);
  for (int i = 0; i < 100; ++i) {
    const EncodedPose pose = synthetic::random_encoded_pose(rng);
    c.expect(bitwise_equal(deserialize_tensor(serialize_tensor(pose)), pose), fmt::format("tensor {} differs", i));
  }

  const auto seq = load_kitti_poses(fs::path(EPIPOSE_TEST_DATA) / "kitti_golden.txt");
  c.expect(seq.frames.size() == 5, "golden file frame count");
  if (seq.frames.size() == 5) {
    Mat3 R2;
    R2 << 0.6, 0, -0.8, 0, 1, 0, 0.8, 0, 0.6;
    const std::pair<Mat3, Vec3> expected[] = {
        {Mat3::Identity(), Vec3::Zero()},
        {Mat3::Identity(), Vec3(0, 0, -0.8)},
        {R2, Vec3(1.22, 0, -1.04)},
        {(Mat3() << 1, 0, 0, 0, 0.8, 0.6, 0, -0.6, 0.8).finished(), Vec3(-0.2, -1.4, -1.95)},
        {(Mat3() << 0, 1, 0, -1, 0, 0, 0, 0, 1).finished(), Vec3(0, 0.3, -3.2)},
    };
    for (std::size_t i = 0; i < 5; ++i) {
      const double err = std::max((seq.frames[i].rotation() - expected[i].first).cwiseAbs().maxCoeff(),
                                  (seq.frames[i].translation() - expected[i].second).cwiseAbs().maxCoeff());
      c.expect(err <= 1e-12, fmt::format("golden frame {} off by {:.3e}", i, err));
    }
  }

  auto error_line = [&](const std::string& text, ErrorKind kind, const std::string& where) {
    try {
      (void)parse_kitti_poses(text);
      c.expect(false, fmt::format("no error for {}", where));
    } catch (const Error& e) {
      c.expect(e.kind() == kind && std::string(e.what()).find(where) != std::string::npos,
               fmt::format("expected {} at {}, got '{}'", to_string(kind), where, e.what()));
    }
  };
  const std::string ok = "1 0 0 0 0 1 0 0 0 0 1 0\n";
  error_line(ok + "1 0 0 0 0 1 0 0 0 0 1\n", ErrorKind::ParseError, "line 2");
  error_line(ok + ok + "\n1 0 0 0 0 1 0 0 0 0 1 0 0\n", ErrorKind::ParseError, "line 4");
  error_line(ok + "1 0 0 0 0 1 0 0 nan? 0 1 0\n", ErrorKind::ParseError, "line 2");
  error_line(ok + ok + "3 0 0 0 0 1 0 0 0 0 1 0\n", ErrorKind::InvalidRotation, "line 3");

  const std::string bytes = serialize_tensor(synthetic::random_encoded_pose(rng));
  for (std::size_t cut : {std::size_t(1), std::size_t(100), bytes.size() - 10}) {
    try {
      (void)deserialize_tensor(std::string_view(bytes).substr(0, bytes.size() - cut));
      c.expect(false, "truncated tensor accepted");
    } catch (const Error& e) {
      c.expect(e.kind() == ErrorKind::FormatError, "truncation not a FormatError");
    }
  }
  if (c.ok) c.detail = "100 tensors bitwise, golden poses, error locations";
  return c;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  criterion("grid-cardinality", 1.0, grid_cardinality);
  criterion("epipolar-oracle", 10.0, epipolar_oracle);
  criterion("raster-oracle", 30.0, raster_oracle);
  criterion("encoding-self-check", 60.0, encoding_self_check);
  criterion("extended-channel", 30.0, extended_channel);
  criterion("spectral", 30.0, spectral_suite);
  criterion("metrics", 10.0, metrics_suite);
  criterion("formats", 10.0, formats_suite);
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = total <= kTotalBudgetSeconds;
  if (!in_time) ++g_failures;
  fmt::print("{} {:<22} {:7.3f} s  budget {:.0f} s\n", in_time ? "PASS" : "FAIL", "total-runtime", total,
             kTotalBudgetSeconds);
  fmt::print("{} criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
