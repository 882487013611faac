#include "exctop/binary_image.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "exctop/errors.hpp"

namespace exctop {

long long BinaryImage::count_set() const {
  long long n = 0;
  for (std::uint8_t b : bits) n += b;
  return n;
}

BinaryImage digitize(const FieldSample& field, double level) {
  if (!std::isfinite(level)) throw std::invalid_argument("digitize: level must be finite");
  BinaryImage img;
  img.dims = field.dims;
  img.eps = field.eps;
  img.origin = field.origin;
  img.mode = field.mode;
  img.bits.resize(field.values.size());
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const double v = field.values[i];
    if (!std::isfinite(v))
      throw std::invalid_argument("digitize: field value at flat index " + std::to_string(i) +
                                  " is not finite");
    img.bits[i] = v <= level ? 1 : 0;
  }
  return img;
}

BinaryImage complement(const BinaryImage& img) {
  BinaryImage out = img;
  for (auto& b : out.bits) b = b ? 0 : 1;
  return out;
}

BinaryImage clip_to_window(const BinaryImage& img, const Window& window) {
  if (img.mode != BoundaryMode::Bounded)
    throw std::invalid_argument("clip_to_window: image must be in bounded mode");

  const double half = 0.5 * img.eps;
  const Rect extent{img.origin.x - half, img.origin.x + (img.dims.nx - 1) * img.eps + half,
                    img.origin.y - half, img.origin.y + (img.dims.ny - 1) * img.eps + half};
  const Rect bb = window.bounding_box();
  if (bb.x0 < extent.x0 || bb.x1 > extent.x1 || bb.y0 < extent.y0 || bb.y1 > extent.y1)
    throw WindowOutOfRangeError(
        "clip_to_window: window bounding box [" + std::to_string(bb.x0) + ", " +
        std::to_string(bb.x1) + "] x [" + std::to_string(bb.y0) + ", " + std::to_string(bb.y1) +
        "] exceeds pixel extent [" + std::to_string(extent.x0) + ", " +
        std::to_string(extent.x1) + "] x [" + std::to_string(extent.y0) + ", " +
        std::to_string(extent.y1) + "]");

  BinaryImage out = img;
  for (int iy = 0; iy < img.dims.ny; ++iy) {
    const double y = img.origin.y + iy * img.eps;
    for (int ix = 0; ix < img.dims.nx; ++ix) {
      if (!out.bits[out.index(ix, iy)]) continue;
      const double x = img.origin.x + ix * img.eps;
      if (!window.contains(x, y)) out.bits[out.index(ix, iy)] = 0;
    }
  }
  return out;
}

}  // namespace exctop
