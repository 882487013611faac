#pragma once

namespace exctop {

/// Lattice dimensions: nx columns (direction u1 = +x) by ny rows (u2 = +y).
struct GridDims {
  int nx = 0;
  int ny = 0;

  long long cells() const { return static_cast<long long>(nx) * ny; }
  bool operator==(const GridDims&) const = default;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

/// How to interpret lattice neighbors past the edge of the grid.
enum class BoundaryMode {
  Torus,    // indices wrap; the grid is a flat torus
  Bounded,  // everything outside the grid is background (value 0 / field -inf)
};

inline const char* to_string(BoundaryMode m) {
  return m == BoundaryMode::Torus ? "torus" : "bounded";
}

}  // namespace exctop
