#include "epipose/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "cli_support.hpp"
#include "epipose/io.hpp"
#include "epipose/metrics.hpp"
#include "epipose/spectral.hpp"
#include "epipose/verify.hpp"

namespace epipose::cli {

namespace {

std::string fixed(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.10f}", v);
}

struct SamplingFlags {
  int grid = 15;
  double random_fraction = 0.0;
  std::optional<std::uint64_t> seed;
  CLI::Option* random_opt = nullptr;

  void add(CLI::App& app) {
    auto* grid_opt = app.add_option("--grid", grid, "Regular grid with R samples per axis")
                         ->capture_default_str();
    random_opt = app.add_option("--random-frac", random_fraction,
                                "Random sampling of this fraction of pixels (needs --seed)");
    app.add_option("--seed", seed, "Seed for --random-frac");
    grid_opt->excludes(random_opt);
  }

  GridSpec spec() const {
    GridSpec g;
    if (random_opt && random_opt->count() > 0) {
      if (!seed) throw CLI::ValidationError("--random-frac", "requires an explicit --seed");
      g.kind = GridSpec::Kind::Random;
      g.fraction = random_fraction;
      g.seed = *seed;
    } else {
      g.r = grid;
    }
    return g;
  }
};

struct EncodeFlags {
  bool extended = false;
  bool skip_background = false;
  std::vector<float> bg_color{0.0f, 0.0f, 0.0f};
  double bg_tol = 0.0;

  void add(CLI::App& app) {
    app.add_flag("--extended", extended, "Add the translation-magnitude fourth channel");
    app.add_flag("--skip-background", skip_background,
                 "Do not draw lines for grid pixels of the background colour");
    app.add_option("--bg-color", bg_color, "Background colour R,G,B in [0,1]")
        ->delimiter(',')
        ->expected(3)
        ->check(CLI::Range(0.0f, 1.0f));
    app.add_option("--bg-tol", bg_tol, "Per-channel background tolerance")
        ->check(CLI::NonNegativeNumber);
  }

  EncodeOptions options() const {
    EncodeOptions o;
    o.extended = extended;
    o.skip_background = skip_background;
    o.background_color = {bg_color[0], bg_color[1], bg_color[2]};
    o.background_tolerance = bg_tol;
    return o;
  }
};

struct ViewFlags {
  std::string source;
  std::string src_pose;
  std::string tgt_pose;
  std::optional<std::string> intrinsics;
  std::optional<std::string> tgt_intrinsics;

  void add(CLI::App& app) {
    app.add_option("--source", source, "Source image (PNG)")->required();
    app.add_option("--src-pose", src_pose, "Source pose: camera JSON or poses.txt#FRAME")->required();
    app.add_option("--tgt-pose", tgt_pose, "Target pose: camera JSON or poses.txt#FRAME")->required();
    app.add_option("--intrinsics", intrinsics, "Camera JSON with fx, fy, cx, cy");
    app.add_option("--tgt-intrinsics", tgt_intrinsics, "Target camera intrinsics if they differ");
  }

  struct Resolved {
    ImageBuffer source;
    Intrinsics Ks, Kt;
    Extrinsic src_pose, tgt_pose;
  };

  Resolved resolve() const {
    ImageBuffer img = detail::load_source_image(source);
    const detail::View src = detail::load_view(src_pose);
    const detail::View tgt = detail::load_view(tgt_pose);
    using P = std::optional<std::filesystem::path>;
    const P k_path = intrinsics ? P(*intrinsics) : P();
    const P kt_path = tgt_intrinsics ? P(*tgt_intrinsics) : k_path;
    const int W = img.width(), H = img.height();
    Intrinsics Ks = detail::resolve_intrinsics(k_path, src, W, H);
    Intrinsics Kt = detail::resolve_intrinsics(kt_path, tgt, W, H);
    return {std::move(img), Ks, Kt, src.pose, tgt.pose};
  }
};

int cmd_encode(const ViewFlags& view, const SamplingFlags& sampling, const EncodeFlags& flags,
               const std::string& out_path, const std::optional<std::string>& png_path,
               std::ostream& out, spdlog::logger& log) {
  const auto v = view.resolve();
  const SampleGrid grid = sampling.spec().build(v.source.height(), v.source.width());
  const EncodedPose pose =
      encode_views(v.source, v.Ks, v.Kt, v.src_pose, v.tgt_pose, grid, flags.options());
  write_tensor(pose, out_path);
  if (png_path)
    for (const auto& p : write_encoding_png(pose, *png_path)) log.info("wrote {}", p.string());
  if (pose.status == EncodeStatus::Empty)
    log.warn("empty encoding: every sampled pixel was background or every line missed the image");
  fmt::print(out, "lines_drawn={} pixels_set={} samples={} delta_t={} status={}\n", pose.lines_drawn,
             pose.pixels_set, grid.size(), pose.delta_t ? fmt::format("{}", *pose.delta_t) : "none",
             pose.status == EncodeStatus::Ok ? "ok" : "empty");
  return kExitOk;
}

int cmd_check(const ViewFlags& view, const std::string& tensor_path, double max_dist,
              std::ostream& out) {
  const auto v = view.resolve();
  const EncodedPose pose = read_tensor(tensor_path);
  const auto F = fundamental_matrix(v.Ks, v.Kt, relative_motion(v.src_pose, v.tgt_pose));
  const bool extended = pose.image.channels() == 4;
  const VerifyReport report =
      extended ? verify_encoding(pose, v.source, F, max_dist, v.src_pose.translation(),
                                 v.tgt_pose.translation())
               : verify_encoding(pose, v.source, F, max_dist);
  for (const Violation& bad : report.violations)
    fmt::print(out, "violation x={} y={}: {}\n", bad.pixel.x, bad.pixel.y, bad.reason);
  fmt::print(out, "nonzero_pixels={}\nmax_residual={}\nviolations={}\nmismatches={}\nresult={}\n",
             report.nonzero_pixels, fixed(report.max_residual), report.violation_count,
             report.mismatch_count, report.passed() ? "pass" : "fail");
  return report.passed() ? kExitOk : kExitVerification;
}

int cmd_loss(const std::string& pred_path, const std::string& target_path, double lambda, int ksize,
             std::ostream& out) {
  const ImageBuffer pred = read_png(pred_path);
  const ImageBuffer target = read_png(target_path);
  const LossReport r = total_loss(pred, target, lambda, gaussian_kernel(ksize));
  fmt::print(out, "L1        {}\nspectral  {}\nlambda    {}\ntotal     {}\n", fixed(r.l1),
             fixed(r.spectral), fixed(r.lambda), fixed(r.total));
  fmt::print(out, "l1={}\nspectral={}\nlambda={}\ntotal={}\nksize={}\n", fixed(r.l1),
             fixed(r.spectral), fixed(r.lambda), fixed(r.total), ksize);
  return kExitOk;
}

int cmd_metrics(const std::string& pred_path, const std::string& target_path, std::ostream& out) {
  const ImageBuffer pred = read_png(pred_path);
  const ImageBuffer target = read_png(target_path);
  const MetricReport r = evaluate(pred, target);
  fmt::print(out, "MAE   {}\nSSIM  {}\nPSNR  {} dB\n", fixed(r.mae), fixed(r.ssim), fixed(r.psnr));
  fmt::print(out, "mae={}\nmse={}\nssim={}\npsnr={}\nssim_mode=grayscale\n", fixed(r.mae),
             fixed(r.mse), fixed(r.ssim), fixed(r.psnr));
  return kExitOk;
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DegenerateMotion:
    case ErrorKind::DegenerateLine: return kExitGeometry;
    default: return kExitData;
  }
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& sink) {
  auto logger = std::make_shared<spdlog::logger>(
      "epipose", std::make_shared<spdlog::sinks::ostream_sink_mt>(sink, true));
  logger->set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("EPIPOSE_LOG"); env && *env) {
    level = spdlog::level::from_str(env);
  }
  logger->set_level(level);
  return logger;
}

std::uint64_t pair_seed(std::uint64_t seed, int source_id, int target_id) {
  std::uint64_t z = seed ^ (std::uint64_t(std::uint32_t(source_id)) << 32 | std::uint32_t(target_id));
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

SampleGrid GridSpec::build(int height, int width) const {
  if (kind == Kind::Regular) return grid_samples(height, width, r);
  return random_samples(height, width, fraction, seed);
}

SampleGrid GridSpec::build_for_pair(int height, int width, int source_id, int target_id) const {
  if (kind == Kind::Regular) return grid_samples(height, width, r);
  return random_samples(height, width, fraction, pair_seed(seed, source_id, target_id));
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto log = make_logger(err);

  CLI::App app{"Encode relative camera pose as coloured epipolar lines", "epipose"};
  app.require_subcommand(1);

  // encode
  auto* encode = app.add_subcommand("encode", "Encode one source/target pair into an EPT1 tensor");
  ViewFlags encode_view;
  SamplingFlags encode_sampling;
  EncodeFlags encode_flags;
  std::string encode_out;
  std::optional<std::string> encode_png;
  encode_view.add(*encode);
  encode_sampling.add(*encode);
  encode_flags.add(*encode);
  encode->add_option("--out", encode_out, "Output tensor (.ept)")->required();
  encode->add_option("--png", encode_png, "Also write a PNG visualisation");

  // batch
  auto* batch = app.add_subcommand("batch", "Encode every frame pair of a sequence");
  JobSpec job;
  std::string dataset = "kitti";
  std::string batch_out;
  std::optional<std::string> batch_intrinsics;
  SamplingFlags batch_sampling;
  EncodeFlags batch_flags;
  batch->add_option("--dataset", dataset, "kitti or config")
      ->check(CLI::IsMember({"kitti", "config"}))
      ->capture_default_str();
  batch->add_option("--images", job.images, "Directory of NNNNNN.png frames (and .json for config)")
      ->required();
  batch->add_option("--poses", job.poses, "KITTI pose file (kitti datasets)");
  batch->add_option("--intrinsics", batch_intrinsics, "Camera JSON shared by all frames");
  batch->add_option("--sequence", job.sequence, "Sequence name used in output file names");
  batch->add_option("--max-gap", job.max_gap, "Largest frame distance between source and target")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  batch->add_option("--out", batch_out, "Output directory")->required();
  batch->add_flag("--png", job.png, "Write a PNG visualisation next to each tensor");
  batch->add_option("--workers", job.workers, "Concurrent pairs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  batch_sampling.add(*batch);
  batch_flags.add(*batch);

  // check
  auto* check = app.add_subcommand("check", "Verify a tensor against the inputs that produced it");
  ViewFlags check_view;
  std::string check_tensor;
  double max_dist = kMaxLineDistance;
  check_view.add(*check);
  check->add_option("--tensor", check_tensor, "Tensor to verify")->required();
  check->add_option("--max-dist", max_dist, "Allowed pixel-to-line distance")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  // loss
  auto* loss = app.add_subcommand("loss", "L1 + lambda * spectral loss between two images");
  std::string loss_pred, loss_target;
  double lambda = kDefaultLambda;
  int ksize = kDefaultKernelSize;
  loss->add_option("--pred", loss_pred, "Predicted image (PNG)")->required();
  loss->add_option("--target", loss_target, "Target image (PNG)")->required();
  loss->add_option("--lambda", lambda, "Spectral weight")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  loss->add_option("--ksize", ksize, "Gaussian kernel size (odd, >= 3)")->capture_default_str();

  // metrics
  auto* metrics = app.add_subcommand("metrics", "MAE, SSIM and PSNR between two images");
  std::string metrics_pred, metrics_target;
  metrics->add_option("--pred", metrics_pred, "Predicted image (PNG)")->required();
  metrics->add_option("--target", metrics_target, "Target image (PNG)")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);

    if (encode->parsed())
      return cmd_encode(encode_view, encode_sampling, encode_flags, encode_out, encode_png, out, *log);
    if (check->parsed()) return cmd_check(check_view, check_tensor, max_dist, out);
    if (loss->parsed()) return cmd_loss(loss_pred, loss_target, lambda, ksize, out);
    if (metrics->parsed()) return cmd_metrics(metrics_pred, metrics_target, out);
    if (batch->parsed()) {
      job.dataset = dataset == "kitti" ? DatasetKind::Kitti : DatasetKind::Config;
      job.output_dir = batch_out;
      if (batch_intrinsics) job.intrinsics = *batch_intrinsics;
      job.grid = batch_sampling.spec();
      job.options = batch_flags.options();
      if (job.dataset == DatasetKind::Kitti && job.poses.empty())
        throw CLI::RequiredError("--poses (kitti dataset)");
      const BatchSummary s = run_batch(job, *log);
      for (const auto& f : s.failures) fmt::print(out, "failed {}\n", f);
      fmt::print(out, "pairs={} written={} skipped={} failed={}\n", s.pairs, s.written, s.skipped,
                 s.failures.size());
      return s.exit_code;
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const Error& e) {
    log->error("{}", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    log->error("{}", e.what());
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace epipose::cli
