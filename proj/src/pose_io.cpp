#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "epipose/error.hpp"
#include "epipose/io.hpp"

namespace epipose {

namespace {

using nlohmann::json;

std::optional<double> parse_double(std::string_view token) {
  double value = 0.0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

// Rotation from text: reject beyond the loose tolerance, otherwise snap.
Mat3 checked_text_rotation(const Mat3& R, const std::string& where) {
  if (!R.allFinite() || !is_rotation(R, kTextRotationTolerance))
    throw Error(ErrorKind::InvalidRotation,
                fmt::format("{}: rotation deviates from orthonormal by more than {}", where,
                            kTextRotationTolerance));
  return nearest_rotation(R);
}

double number_field(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw Error(ErrorKind::MissingField, fmt::format("field '{}' is required", key));
  if (!it->is_number())
    throw Error(ErrorKind::ParseError, fmt::format("field '{}': expected a number", key));
  return it->get<double>();
}

Mat3 matrix_field(const json& doc, const char* key) {
  const json& m = doc.at(key);
  if (!m.is_array() || m.size() != 3)
    throw Error(ErrorKind::ParseError, fmt::format("field '{}': expected 3 rows", key));
  Mat3 R;
  for (int i = 0; i < 3; ++i) {
    const json& row = m[std::size_t(i)];
    if (!row.is_array() || row.size() != 3)
      throw Error(ErrorKind::ParseError, fmt::format("field '{}' row {}: expected 3 numbers", key, i));
    for (int j = 0; j < 3; ++j) {
      if (!row[std::size_t(j)].is_number())
        throw Error(ErrorKind::ParseError,
                    fmt::format("field '{}'[{}][{}]: expected a number", key, i, j));
      R(i, j) = row[std::size_t(j)].get<double>();
    }
  }
  return R;
}

Vec3 vector_field(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_array() || v.size() != 3)
    throw Error(ErrorKind::ParseError, fmt::format("field '{}': expected 3 numbers", key));
  Vec3 t;
  for (int i = 0; i < 3; ++i) {
    if (!v[std::size_t(i)].is_number())
      throw Error(ErrorKind::ParseError, fmt::format("field '{}'[{}]: expected a number", key, i));
    t(i) = v[std::size_t(i)].get<double>();
  }
  return t;
}

PoseConvention parse_convention(const json& doc) {
  const auto it = doc.find("convention");
  if (it == doc.end())
    throw Error(ErrorKind::MissingField, "field 'convention' is required when a pose is given");
  if (!it->is_string()) throw Error(ErrorKind::ParseError, "field 'convention': expected a string");
  const auto value = it->get<std::string>();
  if (value == "world_to_camera") return PoseConvention::WorldToCamera;
  if (value == "camera_to_world") return PoseConvention::CameraToWorld;
  throw Error(ErrorKind::ParseError,
              fmt::format("field 'convention': unknown value '{}' (expected world_to_camera or "
                          "camera_to_world)",
                          value));
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

std::string_view to_string(PoseConvention convention) noexcept {
  return convention == PoseConvention::WorldToCamera ? "world_to_camera" : "camera_to_world";
}

Extrinsic to_world_to_camera(const Extrinsic& pose, PoseConvention convention) {
  return convention == PoseConvention::WorldToCamera ? pose : pose.inverse();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PoseSequence parse_kitti_poses(std::string_view text) {
  PoseSequence seq;
  seq.source_convention = PoseConvention::CameraToWorld;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    std::vector<double> values;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i == line.size()) break;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      const auto token = line.substr(i, j - i);
      const auto value = parse_double(token);
      if (!value)
        throw Error(ErrorKind::ParseError,
                    fmt::format("line {}: invalid number '{}'", line_no, token));
      values.push_back(*value);
      i = j;
    }
    if (values.empty()) continue;
    if (values.size() != 12)
      throw Error(ErrorKind::ParseError,
                  fmt::format("line {}: expected 12 values, found {}", line_no, values.size()));

    Mat3 R;
    Vec3 t;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) R(r, c) = values[std::size_t(r * 4 + c)];
      t(r) = values[std::size_t(r * 4 + 3)];
    }
    if (!t.allFinite())
      throw Error(ErrorKind::ParseError, fmt::format("line {}: non-finite translation", line_no));
    const Mat3 R_cw = checked_text_rotation(R, fmt::format("line {}", line_no));
    seq.frames.push_back(Extrinsic(R_cw, t).inverse());
    seq.frame_ids.push_back(int(seq.frames.size()) - 1);
  }
  return seq;
}

PoseSequence load_kitti_poses(const std::filesystem::path& path) {
  try {
    return parse_kitti_poses(read_text_file(path));
  } catch (const Error& e) {
    throw Error(e.kind(), fmt::format("{}: {}", path.string(), e.message()));
  }
}

CameraConfig parse_camera_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorKind::ParseError,
                fmt::format("line {}, column {}: malformed camera config", line, column));
  }
  if (!doc.is_object()) throw Error(ErrorKind::ParseError, "camera config must be a JSON object");

  const double skew = doc.contains("skew") ? number_field(doc, "skew") : 0.0;
  CameraConfig config{Intrinsics(number_field(doc, "fx"), number_field(doc, "fy"),
                                 number_field(doc, "cx"), number_field(doc, "cy"), skew),
                      std::nullopt, std::nullopt};

  const bool has_width = doc.contains("width"), has_height = doc.contains("height");
  if (has_width != has_height)
    throw Error(ErrorKind::MissingField,
                fmt::format("field '{}' is required alongside '{}'", has_width ? "height" : "width",
                            has_width ? "width" : "height"));
  if (has_width) {
    const double w = number_field(doc, "width"), h = number_field(doc, "height");
    if (w < 1 || h < 1 || w != std::floor(w) || h != std::floor(h))
      throw Error(ErrorKind::ParseError, "fields 'width'/'height' must be positive integers");
    config.image_size = std::pair(int(w), int(h));
  }

  const bool has_R = doc.contains("R"), has_t = doc.contains("t");
  if (has_R != has_t)
    throw Error(ErrorKind::MissingField,
                fmt::format("field '{}' is required alongside '{}'", has_R ? "t" : "R",
                            has_R ? "R" : "t"));
  if (has_R) {
    const PoseConvention convention = parse_convention(doc);
    const Mat3 R = checked_text_rotation(matrix_field(doc, "R"), "field 'R'");
    const Vec3 t = vector_field(doc, "t");
    if (!t.allFinite()) throw Error(ErrorKind::ParseError, "field 't': non-finite value");
    config.pose = to_world_to_camera(Extrinsic(R, t), convention);
  }
  return config;
}

CameraConfig load_camera_config(const std::filesystem::path& path) {
  try {
    return parse_camera_config(read_text_file(path));
  } catch (const Error& e) {
    throw Error(e.kind(), fmt::format("{}: {}", path.string(), e.message()));
  }
}

}  // namespace epipose
