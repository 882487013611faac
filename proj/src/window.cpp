#include "exctop/window.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "exctop/errors.hpp"

namespace exctop {
namespace {

void check_rect(const Rect& r, std::size_t index) {
  const bool finite = std::isfinite(r.x0) && std::isfinite(r.x1) &&
                      std::isfinite(r.y0) && std::isfinite(r.y1);
  if (!finite)
    throw InvalidWindowError("rectangle " + std::to_string(index) + " has non-finite bounds");
  if (!(r.x0 < r.x1) || !(r.y0 < r.y1))
    throw InvalidWindowError("rectangle " + std::to_string(index) +
                             " is degenerate: need x0 < x1 and y0 < y1");
}

std::array<std::array<double, 2>, 4> corners(const Rect& r) {
  return {{{r.x0, r.y0}, {r.x0, r.y1}, {r.x1, r.y0}, {r.x1, r.y1}}};
}

}  // namespace

Window::Window(std::vector<Rect> rects) : rects_(std::move(rects)) {
  if (rects_.empty()) throw InvalidWindowError("window needs at least one rectangle");
  for (std::size_t i = 0; i < rects_.size(); ++i) check_rect(rects_[i], i);

  // The no-shared-corner rule is exact double equality: corner coincidence
  // only matters when the caller wrote down the same coordinates twice.
  for (std::size_t i = 0; i < rects_.size(); ++i) {
    for (std::size_t j = i + 1; j < rects_.size(); ++j) {
      for (const auto& a : corners(rects_[i])) {
        for (const auto& b : corners(rects_[j])) {
          if (a[0] == b[0] && a[1] == b[1])
            throw InvalidWindowError("rectangles " + std::to_string(i) + " and " +
                                     std::to_string(j) + " share the corner point (" +
                                     std::to_string(a[0]) + ", " + std::to_string(a[1]) + ")");
        }
      }
    }
  }

  xs_.reserve(rects_.size() * 2);
  ys_.reserve(rects_.size() * 2);
  for (const Rect& r : rects_) {
    xs_.push_back(r.x0);
    xs_.push_back(r.x1);
    ys_.push_back(r.y0);
    ys_.push_back(r.y1);
  }
  std::sort(xs_.begin(), xs_.end());
  xs_.erase(std::unique(xs_.begin(), xs_.end()), xs_.end());
  std::sort(ys_.begin(), ys_.end());
  ys_.erase(std::unique(ys_.begin(), ys_.end()), ys_.end());

  // Occupancy by cell center. Centers sit strictly between adjacent cuts and
  // every rectangle bound is a cut, so membership is never a borderline call.
  const std::size_t ncx = xs_.size() - 1, ncy = ys_.size() - 1;
  occ_.assign(ncx * ncy, 0);
  for (std::size_t j = 0; j < ncy; ++j) {
    const double my = 0.5 * (ys_[j] + ys_[j + 1]);
    for (std::size_t i = 0; i < ncx; ++i) {
      const double mx = 0.5 * (xs_[i] + xs_[i + 1]);
      occ_[j * ncx + i] = contains(mx, my) ? 1 : 0;
    }
  }

  // Diagonal cell contact at a vertex would be a pinch point; the corner rule
  // above should already exclude it, but verify on the grid to be safe.
  for (std::size_t j = 0; j < ys_.size(); ++j) {
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      const int gi = static_cast<int>(i), gj = static_cast<int>(j);
      const bool sw = occupied(gi - 1, gj - 1), se = occupied(gi, gj - 1);
      const bool nw = occupied(gi - 1, gj), ne = occupied(gi, gj);
      if ((sw && ne && !se && !nw) || (se && nw && !sw && !ne))
        throw InvalidWindowError("window pinches to a point at (" + std::to_string(xs_[i]) +
                                 ", " + std::to_string(ys_[j]) + ")");
    }
  }
}

Window Window::from_quads(const std::vector<std::array<double, 4>>& quads) {
  std::vector<Rect> rects;
  rects.reserve(quads.size());
  for (const auto& q : quads) rects.push_back(Rect{q[0], q[1], q[2], q[3]});
  return Window(std::move(rects));
}

bool Window::occupied(int i, int j) const {
  const int ncx = static_cast<int>(xs_.size()) - 1;
  const int ncy = static_cast<int>(ys_.size()) - 1;
  if (i < 0 || j < 0 || i >= ncx || j >= ncy) return false;
  return occ_[static_cast<std::size_t>(j) * ncx + i] != 0;
}

int Window::quad_count(int i, int j) const {
  return static_cast<int>(occupied(i - 1, j - 1)) + static_cast<int>(occupied(i, j - 1)) +
         static_cast<int>(occupied(i - 1, j)) + static_cast<int>(occupied(i, j));
}

double Window::vol() const {
  const int ncx = static_cast<int>(xs_.size()) - 1;
  const int ncy = static_cast<int>(ys_.size()) - 1;
  double total = 0.0;
  for (int j = 0; j < ncy; ++j)
    for (int i = 0; i < ncx; ++i)
      if (occupied(i, j)) total += (xs_[i + 1] - xs_[i]) * (ys_[j + 1] - ys_[j]);
  return total;
}

double Window::per_u1() const {
  // Boundary crossed when moving in u1: vertical edges where occupancy flips.
  const int ncx = static_cast<int>(xs_.size()) - 1;
  const int ncy = static_cast<int>(ys_.size()) - 1;
  double total = 0.0;
  for (int j = 0; j < ncy; ++j)
    for (int i = 0; i <= ncx; ++i)
      if (occupied(i - 1, j) != occupied(i, j)) total += ys_[j + 1] - ys_[j];
  return total;
}

double Window::per_u2() const {
  const int ncx = static_cast<int>(xs_.size()) - 1;
  const int ncy = static_cast<int>(ys_.size()) - 1;
  double total = 0.0;
  for (int j = 0; j <= ncy; ++j)
    for (int i = 0; i < ncx; ++i)
      if (occupied(i, j - 1) != occupied(i, j)) total += xs_[i + 1] - xs_[i];
  return total;
}

int Window::euler() const {
  // Count cells of the CW complex induced by the compressed grid on the
  // closed union: a vertex/edge belongs to the complex iff some occupied
  // closed cell contains it.
  const int ncx = static_cast<int>(xs_.size()) - 1;
  const int ncy = static_cast<int>(ys_.size()) - 1;
  long long v = 0, e = 0, f = 0;
  for (int j = 0; j <= ncy; ++j)
    for (int i = 0; i <= ncx; ++i)
      if (quad_count(i, j) > 0) ++v;
  for (int j = 0; j < ncy; ++j)  // vertical edges on grid line x = xs_[i]
    for (int i = 0; i <= ncx; ++i)
      if (occupied(i - 1, j) || occupied(i, j)) ++e;
  for (int j = 0; j <= ncy; ++j)  // horizontal edges on grid line y = ys_[j]
    for (int i = 0; i < ncx; ++i)
      if (occupied(i, j - 1) || occupied(i, j)) ++e;
  for (int j = 0; j < ncy; ++j)
    for (int i = 0; i < ncx; ++i)
      if (occupied(i, j)) ++f;
  return static_cast<int>(v - e + f);
}

int Window::corner_count() const {
  // A grid vertex is a boundary corner iff 1 or 3 of its four surrounding
  // cells are occupied. 0/4 are off the boundary, 2-adjacent is a straight
  // boundary run, and 2-diagonal was rejected at construction.
  const int ncx = static_cast<int>(xs_.size()) - 1;
  const int ncy = static_cast<int>(ys_.size()) - 1;
  int count = 0;
  for (int j = 0; j <= ncy; ++j) {
    for (int i = 0; i <= ncx; ++i) {
      const int q = quad_count(i, j);
      if (q == 1 || q == 3) ++count;
    }
  }
  return count;
}

Rect Window::bounding_box() const {
  return Rect{xs_.front(), xs_.back(), ys_.front(), ys_.back()};
}

bool Window::contains(double x, double y) const {
  for (const Rect& r : rects_)
    if (r.x0 <= x && x <= r.x1 && r.y0 <= y && y <= r.y1) return true;
  return false;
}

}  // namespace exctop
