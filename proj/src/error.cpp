#include "epipose/error.hpp"

namespace epipose {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidIntrinsics: return "InvalidIntrinsics";
    case ErrorKind::InvalidRotation: return "InvalidRotation";
    case ErrorKind::InvalidFundamental: return "InvalidFundamental";
    case ErrorKind::DegenerateMotion: return "DegenerateMotion";
    case ErrorKind::DegenerateLine: return "DegenerateLine";
    case ErrorKind::BadGrid: return "BadGrid";
    case ErrorKind::BadKernel: return "BadKernel";
    case ErrorKind::ImageTooSmall: return "ImageTooSmall";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::DecodeError: return "DecodeError";
    case ErrorKind::UnsupportedBitDepth: return "UnsupportedBitDepth";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MissingField: return "MissingField";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace epipose
