#include "epipose/image.hpp"

namespace epipose {

ImageBuffer to_rgb(const ImageBuffer& image) {
  if (image.channels() == 3) return image;
  if (image.channels() != 1 && image.channels() != 2 && image.channels() != 4)
    throw Error(ErrorKind::InvalidArgument, "cannot convert a " + std::to_string(image.channels()) +
                                                "-channel image to RGB");
  ImageBuffer out(image.height(), image.width(), 3);
  const bool grey = image.channels() <= 2;
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x)
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = image.at(y, x, grey ? 0 : c);
  return out;
}

}  // namespace epipose
