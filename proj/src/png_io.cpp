#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>

#include <fmt/format.h>
#include <png.h>

#include "epipose/error.hpp"
#include "epipose/io.hpp"

namespace epipose {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw Error(ErrorKind::IoError, fmt::format("cannot open '{}'", path.string()));
  return f;
}

struct PngErrorState {
  char message[256] = "libpng error";
};

[[noreturn]] void on_png_error(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof state->message, "%s", msg ? msg : "libpng error");
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

struct ReadStructs {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~ReadStructs() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

struct WriteStructs {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~WriteStructs() { png_destroy_write_struct(&png, info ? &info : nullptr); }
};

struct Decoded {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int channels = 0;
  int depth = 0;
  int unsupported_depth = 0;
  std::vector<png_byte> storage;
  std::vector<png_bytep> rows;
};

// Returns false when libpng reported an error. Nothing but `d` is written
// after setjmp, so no local state can be clobbered by the longjmp.
bool decode(png_structp png, png_infop info, std::FILE* file, Decoded& d) {
  if (setjmp(png_jmpbuf(png))) return false;

  png_init_io(png, file);
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color_type = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color_type != PNG_COLOR_TYPE_PALETTE && depth < 8) {
    d.unsupported_depth = depth;
    return true;
  }
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  d.width = png_get_image_width(png, info);
  d.height = png_get_image_height(png, info);
  d.channels = png_get_channels(png, info);
  d.depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  d.storage.resize(stride * d.height);
  d.rows.resize(d.height);
  for (png_uint_32 y = 0; y < d.height; ++y) d.rows[y] = d.storage.data() + y * stride;
  png_read_image(png, d.rows.data());
  png_read_end(png, nullptr);
  return true;
}

bool encode_rows(png_structp png, png_infop info, std::FILE* file, png_uint_32 width,
                 png_uint_32 height, int color_type, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, file);
  png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  return true;
}

}  // namespace

ImageBuffer read_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  png_byte signature[8] = {};
  if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0)
    throw Error(ErrorKind::DecodeError, fmt::format("'{}' is not a PNG file", path.string()));

  PngErrorState err;
  ReadStructs s;
  s.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, on_png_error, on_png_warning);
  if (!s.png) throw Error(ErrorKind::DecodeError, "cannot allocate PNG reader");
  s.info = png_create_info_struct(s.png);
  if (!s.info) throw Error(ErrorKind::DecodeError, "cannot allocate PNG info");

  Decoded d;
  if (!decode(s.png, s.info, file.get(), d))
    throw Error(ErrorKind::DecodeError, fmt::format("'{}': {}", path.string(), err.message));
  if (d.unsupported_depth)
    throw Error(ErrorKind::UnsupportedBitDepth,
                fmt::format("'{}': {}-bit greyscale is not supported", path.string(),
                            d.unsupported_depth));

  ImageBuffer image(int(d.height), int(d.width), d.channels);
  auto out = image.values();
  if (d.depth == 16) {
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = float((unsigned(d.storage[2 * i]) << 8 | d.storage[2 * i + 1]) / 65535.0);
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = float(d.storage[i] / 255.0);
  }
  return image;
}

void write_png(const ImageBuffer& image, const std::filesystem::path& path) {
  int color_type = 0;
  switch (image.channels()) {
    case 1: color_type = PNG_COLOR_TYPE_GRAY; break;
    case 3: color_type = PNG_COLOR_TYPE_RGB; break;
    case 4: color_type = PNG_COLOR_TYPE_RGB_ALPHA; break;
    default:
      throw Error(ErrorKind::InvalidArgument,
                  fmt::format("cannot write a {}-channel PNG", image.channels()));
  }
  if (image.height() < 1 || image.width() < 1)
    throw Error(ErrorKind::InvalidArgument, "cannot write an empty PNG");

  std::vector<png_byte> storage(image.size());
  const auto in = image.values();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double v = std::isnan(in[i]) ? 0.0 : std::clamp(double(in[i]), 0.0, 1.0);
    storage[i] = png_byte(std::lround(v * 255.0));
  }
  const std::size_t stride = std::size_t(image.width()) * std::size_t(image.channels());
  std::vector<png_bytep> rows(std::size_t(image.height()));
  for (std::size_t y = 0; y < rows.size(); ++y) rows[y] = storage.data() + y * stride;

  FilePtr file = open_file(path, "wb");
  PngErrorState err;
  WriteStructs s;
  s.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, on_png_error, on_png_warning);
  if (!s.png) throw Error(ErrorKind::IoError, "cannot allocate PNG writer");
  s.info = png_create_info_struct(s.png);
  if (!s.info) throw Error(ErrorKind::IoError, "cannot allocate PNG info");

  if (!encode_rows(s.png, s.info, file.get(), png_uint_32(image.width()),
                   png_uint_32(image.height()), color_type, rows.data()))
    throw Error(ErrorKind::IoError, fmt::format("'{}': {}", path.string(), err.message));
}

std::vector<std::filesystem::path> write_encoding_png(const EncodedPose& pose,
                                                      const std::filesystem::path& path) {
  const ImageBuffer& img = pose.image;
  ImageBuffer rgb(img.height(), img.width(), 3);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c) rgb.at(y, x, c) = img.at(y, x, c);
  write_png(rgb, path);
  std::vector<std::filesystem::path> written{path};

  if (img.channels() == 4) {
    ImageBuffer grey(img.height(), img.width(), 1, 0.0f);
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) {
        const auto px = img.pixel(y, x);
        if (std::max({px[0], px[1], px[2]}) > 0.0f)
          grey.at(y, x) = float(pose.delta_viz.apply(px[3]));
      }
    auto delta_path = path;
    delta_path.replace_filename(path.stem().string() + "_delta" + path.extension().string());
    write_png(grey, delta_path);
    written.push_back(delta_path);
  }
  return written;
}

}  // namespace epipose
