#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "epipose/error.hpp"
#include "epipose/io.hpp"

namespace epipose {

namespace {

constexpr std::size_t kHeaderSize = 24;
constexpr int kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "tensor codec assumes a little-endian host");

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::string_view bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(std::uint8_t(bytes[offset + std::size_t(i)])) << (8 * i);
  return v;
}

[[noreturn]] void format_error(const std::string& message) {
  throw Error(ErrorKind::FormatError, message);
}

template <typename T>
T parse_number(const std::map<std::string, std::string, std::less<>>& meta, std::string_view key) {
  const auto it = meta.find(key);
  if (it == meta.end()) format_error(fmt::format("metadata key '{}' missing", key));
  T value{};
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    format_error(fmt::format("metadata key '{}': bad value '{}'", key, s));
  return value;
}

bool parse_flag(const std::map<std::string, std::string, std::less<>>& meta, std::string_view key) {
  const int v = parse_number<int>(meta, key);
  if (v != 0 && v != 1) format_error(fmt::format("metadata key '{}' must be 0 or 1", key));
  return v == 1;
}

std::string metadata_text(const EncodedPose& pose) {
  std::string m;
  auto line = [&](std::string_view key, const auto& value) {
    m += fmt::format("{}={}\n", key, value);
  };
  line("format", kFormatVersion);
  std::visit(
      [&](const auto& mode) {
        using M = std::decay_t<decltype(mode)>;
        if constexpr (std::is_same_v<M, RegularMode>) {
          line("grid_mode", "regular");
          line("grid_r", mode.r);
        } else {
          line("grid_mode", "random");
          line("grid_fraction", mode.fraction);
          line("grid_seed", mode.seed);
          line("grid_generator", kRandomGeneratorName);
        }
      },
      pose.grid.mode());
  line("skip_background", pose.options.skip_background ? 1 : 0);
  line("bg_r", pose.options.background_color[0]);
  line("bg_g", pose.options.background_color[1]);
  line("bg_b", pose.options.background_color[2]);
  line("bg_tol", pose.options.background_tolerance);
  line("extended", pose.options.extended ? 1 : 0);
  if (pose.delta_t) line("delta_t", *pose.delta_t);
  line("delta_viz_offset", pose.delta_viz.offset);
  line("delta_viz_scale", pose.delta_viz.scale);
  line("lines_drawn", pose.lines_drawn);
  line("pixels_set", pose.pixels_set);
  line("status", pose.status == EncodeStatus::Ok ? "ok" : "empty");
  return m;
}

}  // namespace

std::string serialize_tensor(const EncodedPose& pose) {
  const ImageBuffer& img = pose.image;
  if (img.channels() != 3 && img.channels() != 4)
    throw Error(ErrorKind::InvalidArgument, "encoded pose must have 3 or 4 channels");
  const std::string meta = metadata_text(pose);

  std::string out;
  out.reserve(kHeaderSize + meta.size() + img.size() * 4);
  out.append(kTensorMagic, 4);
  out.push_back(char(kTensorFloat32));
  out.append(3, '\0');
  put_u32(out, std::uint32_t(img.height()));
  put_u32(out, std::uint32_t(img.width()));
  put_u32(out, std::uint32_t(img.channels()));
  put_u32(out, std::uint32_t(meta.size()));
  out += meta;
  const auto values = img.values();
  out.append(reinterpret_cast<const char*>(values.data()), values.size_bytes());
  return out;
}

EncodedPose deserialize_tensor(std::string_view bytes) {
  if (bytes.size() < kHeaderSize) format_error(fmt::format("truncated header ({} bytes)", bytes.size()));
  if (std::memcmp(bytes.data(), kTensorMagic, 4) != 0) format_error("bad magic, expected EPT1");
  if (std::uint8_t(bytes[4]) != kTensorFloat32)
    format_error(fmt::format("unsupported dtype tag {}", int(std::uint8_t(bytes[4]))));
  if (bytes[5] != 0 || bytes[6] != 0 || bytes[7] != 0) format_error("reserved header bytes not zero");

  const std::uint32_t H = get_u32(bytes, 8), W = get_u32(bytes, 12), C = get_u32(bytes, 16);
  const std::uint32_t M = get_u32(bytes, 20);
  if (H == 0 || W == 0 || H > (1u << 20) || W > (1u << 20))
    format_error(fmt::format("implausible dimensions {}x{}", W, H));
  if (C != 3 && C != 4) format_error(fmt::format("channel count {} is not 3 or 4", C));

  const std::uint64_t payload = std::uint64_t(H) * W * C * 4;
  const std::uint64_t expected = kHeaderSize + std::uint64_t(M) + payload;
  if (bytes.size() < expected)
    format_error(fmt::format("truncated: {} bytes, dims {}x{}x{} need {}", bytes.size(), H, W, C,
                             expected));
  if (bytes.size() > expected)
    format_error(fmt::format("{} trailing bytes after payload for dims {}x{}x{}",
                             bytes.size() - expected, H, W, C));

  std::map<std::string, std::string, std::less<>> meta;
  const std::string_view text = bytes.substr(kHeaderSize, M);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) format_error("metadata line not terminated");
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos || eq == 0)
      format_error(fmt::format("malformed metadata line '{}'", line));
    meta.emplace(std::string(line.substr(0, eq)), std::string(line.substr(eq + 1)));
  }

  if (parse_number<int>(meta, "format") != kFormatVersion)
    format_error("unsupported metadata format version");

  SamplingMode mode;
  const auto grid_mode = meta.find("grid_mode");
  if (grid_mode == meta.end()) format_error("metadata key 'grid_mode' missing");
  if (grid_mode->second == "regular") {
    mode = RegularMode{parse_number<int>(meta, "grid_r")};
  } else if (grid_mode->second == "random") {
    const auto gen = meta.find("grid_generator");
    if (gen == meta.end() || gen->second != kRandomGeneratorName)
      format_error("random grid written by an unknown generator");
    mode = RandomMode{parse_number<double>(meta, "grid_fraction"),
                      parse_number<std::uint64_t>(meta, "grid_seed")};
  } else {
    format_error(fmt::format("unknown grid_mode '{}'", grid_mode->second));
  }

  EncodedPose pose;
  try {
    pose.grid = make_grid(int(H), int(W), mode);
  } catch (const Error& e) {
    format_error(fmt::format("grid does not fit the tensor: {}", e.message()));
  }
  pose.options.skip_background = parse_flag(meta, "skip_background");
  pose.options.background_color = {parse_number<float>(meta, "bg_r"),
                                   parse_number<float>(meta, "bg_g"),
                                   parse_number<float>(meta, "bg_b")};
  pose.options.background_tolerance = parse_number<double>(meta, "bg_tol");
  pose.options.extended = parse_flag(meta, "extended");
  if (meta.contains("delta_t")) pose.delta_t = parse_number<double>(meta, "delta_t");
  if (pose.options.extended != (C == 4) || pose.delta_t.has_value() != (C == 4))
    format_error("extended flag, delta_t and channel count disagree");
  pose.delta_viz.offset = parse_number<double>(meta, "delta_viz_offset");
  pose.delta_viz.scale = parse_number<double>(meta, "delta_viz_scale");
  pose.lines_drawn = parse_number<std::size_t>(meta, "lines_drawn");
  pose.pixels_set = parse_number<std::size_t>(meta, "pixels_set");
  const auto status = meta.find("status");
  if (status == meta.end() || (status->second != "ok" && status->second != "empty"))
    format_error("metadata key 'status' missing or invalid");
  pose.status = status->second == "ok" ? EncodeStatus::Ok : EncodeStatus::Empty;

  pose.image = ImageBuffer(int(H), int(W), int(C));
  auto values = pose.image.values();
  std::memcpy(values.data(), bytes.data() + kHeaderSize + M, values.size_bytes());
  return pose;
}

void write_tensor(const EncodedPose& pose, const std::filesystem::path& path) {
  const std::string bytes = serialize_tensor(pose);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, fmt::format("cannot open '{}' for writing", path.string()));
  out.write(bytes.data(), std::streamsize(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, fmt::format("write to '{}' failed", path.string()));
}

EncodedPose read_tensor(const std::filesystem::path& path) {
  try {
    return deserialize_tensor(read_text_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::IoError) throw;
    throw Error(e.kind(), fmt::format("{}: {}", path.string(), e.message()));
  }
}

}  // namespace epipose
