#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace exctop {

/// Closed axis-aligned rectangle [x0,x1] x [y0,y1] with positive side lengths.
struct Rect {
  double x0 = 0.0;
  double x1 = 0.0;
  double y0 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool operator==(const Rect&) const = default;
};

/// Observation window: a finite union of closed axis-aligned rectangles.
/// Rectangles may overlap or touch along edges, but no two may share a
/// corner point -- that would create the checkerboard contact whose Euler
/// characteristic is convention-dependent, so it is rejected up front.
///
/// Geometry is evaluated exactly on the compressed coordinate grid spanned
/// by the rectangle bounds (no rasterization, no tolerances).
class Window {
 public:
  explicit Window(std::vector<Rect> rects);

  /// Quadruples in [x0, x1, y0, y1] order, as accepted by the CLI.
  static Window from_quads(const std::vector<std::array<double, 4>>& quads);

  const std::vector<Rect>& rects() const { return rects_; }

  double vol() const;     // area of the union
  double per_u1() const;  // length of boundary seen in direction u1 (vertical edges)
  double per_u2() const;  // length of boundary seen in direction u2 (horizontal edges)
  double per_inf() const { return per_u1() + per_u2(); }
  int euler() const;         // V - E + F over the cell complex of the closed union
  int corner_count() const;  // boundary corners, convex and reflex alike

  Rect bounding_box() const;
  bool contains(double x, double y) const;  // closed-set membership

 private:
  bool occupied(int i, int j) const;  // compressed cell, false outside range
  int quad_count(int i, int j) const;  // occupied cells around grid vertex (i,j)

  std::vector<Rect> rects_;
  std::vector<double> xs_, ys_;  // sorted unique rectangle bounds
  std::vector<std::uint8_t> occ_;  // (xs_-1) x (ys_-1) cell occupancy, row-major in j
};

}  // namespace exctop
