#pragma once

#include <cstdint>
#include <vector>

#include "exctop/field.hpp"
#include "exctop/grid.hpp"
#include "exctop/window.hpp"

namespace exctop {

/// Binary pixel image: the digitized excursion set. Pixel (ix, iy) sits at
/// world position origin + (ix*eps, iy*eps); storage is row-major with iy
/// increasing in +y, exactly like FieldSample. In bounded mode everything
/// outside the grid reads as background; in torus mode indices wrap.
struct BinaryImage {
  GridDims dims;
  double eps = 1.0;
  Vec2 origin;
  BoundaryMode mode = BoundaryMode::Bounded;
  std::vector<std::uint8_t> bits;  // 0 or 1, bits[iy*nx + ix]

  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * dims.nx + ix;
  }

  /// Raw in-range access.
  bool get(int ix, int iy) const { return bits[index(ix, iy)] != 0; }

  /// Boundary-aware access for any integer coordinates.
  bool at(int ix, int iy) const {
    if (mode == BoundaryMode::Torus) {
      ix %= dims.nx;
      if (ix < 0) ix += dims.nx;
      iy %= dims.ny;
      if (iy < 0) iy += dims.ny;
      return get(ix, iy);
    }
    if (ix < 0 || iy < 0 || ix >= dims.nx || iy >= dims.ny) return false;
    return get(ix, iy);
  }

  long long count_set() const;
};

/// Excursion set {f <= level}: a pixel is foreground iff its field value is
/// at or below the level (ties count as foreground). Throws
/// std::invalid_argument if the field contains non-finite values.
BinaryImage digitize(const FieldSample& field, double level);

/// Pixelwise complement; preserves grid metadata.
BinaryImage complement(const BinaryImage& img);

/// Keeps foreground pixels whose centers lie in the closed window; requires
/// bounded mode. Throws WindowOutOfRangeError if the window is not contained
/// in the pixel extent [origin - eps/2, origin + (n-1)*eps + eps/2] per axis.
BinaryImage clip_to_window(const BinaryImage& img, const Window& window);

}  // namespace exctop
