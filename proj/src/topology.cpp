#include "exctop/topology.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace exctop {
namespace {

/// Union-find with path halving; small and allocation-light.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

ConfigCounts config_counts(const BinaryImage& img) {
  // Both configuration patterns vanish outside the grid: n_plus needs a set
  // center, n_minus needs set left and down neighbors, and any center beyond
  // the grid has at least one of those neighbors outside too. So scanning the
  // grid itself is exhaustive in bounded mode, and is the fundamental domain
  // in torus mode.
  ConfigCounts counts;
  for (int iy = 0; iy < img.dims.ny; ++iy) {
    for (int ix = 0; ix < img.dims.nx; ++ix) {
      if (img.get(ix, iy)) {
        if (!img.at(ix + 1, iy) && !img.at(ix, iy + 1)) ++counts.n_plus;
      } else {
        if (img.at(ix - 1, iy) && img.at(ix, iy - 1)) ++counts.n_minus;
      }
    }
  }
  return counts;
}

long long chi_bicov(const BinaryImage& img) {
  const ConfigCounts counts = config_counts(img);
  return counts.n_plus - counts.n_minus;
}

long long chi_complex(const BinaryImage& img) {
  const int nx = img.dims.nx, ny = img.dims.ny;
  long long v = 0, e = 0, s = 0;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      if (!img.get(ix, iy)) continue;
      ++v;
      if (img.at(ix + 1, iy)) ++e;
      if (img.at(ix, iy + 1)) ++e;
      if (img.at(ix + 1, iy) && img.at(ix, iy + 1) && img.at(ix + 1, iy + 1)) ++s;
    }
  }
  // In bounded mode the at() calls above already return false past the edge;
  // in torus mode they wrap, so every edge and square is counted exactly once.
  return v - e + s;
}

int components(const BinaryImage& img, int adjacency) {
  if (adjacency != 4 && adjacency != 8)
    throw std::invalid_argument("components: adjacency must be 4 or 8");
  const int nx = img.dims.nx, ny = img.dims.ny;
  DisjointSets sets(static_cast<std::size_t>(nx) * ny);

  auto link = [&](int ix, int iy, int jx, int jy) {
    if (!img.at(jx, jy)) return;
    if (img.mode == BoundaryMode::Torus) {
      jx = ((jx % nx) + nx) % nx;
      jy = ((jy % ny) + ny) % ny;
    }
    sets.unite(img.index(ix, iy), img.index(jx, jy));
  };

  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      if (!img.get(ix, iy)) continue;
      link(ix, iy, ix + 1, iy);
      link(ix, iy, ix, iy + 1);
      if (adjacency == 8) {
        link(ix, iy, ix + 1, iy + 1);
        link(ix, iy, ix - 1, iy + 1);
      }
    }
  }
  // In bounded mode neighbors outside the grid read as background and the
  // link() call does nothing, as intended.

  int count = 0;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      if (img.get(ix, iy) && sets.find(img.index(ix, iy)) == img.index(ix, iy)) ++count;
  return count;
}

int holes(const BinaryImage& img) {
  const int nx = img.dims.nx, ny = img.dims.ny;

  if (img.mode == BoundaryMode::Torus) {
    // No outer region on a torus; report background components minus one.
    const BinaryImage bg = complement(img);
    const int comps = components(bg, 8);
    return comps > 0 ? comps - 1 : 0;
  }

  // Bounded: pad with one background ring so the outer region is a single
  // component, then count the 8-connected background components besides it.
  const int px = nx + 2, py = ny + 2;
  auto bg_at = [&](int ix, int iy) {
    if (ix < 0 || iy < 0 || ix >= px || iy >= py) return false;
    return !img.at(ix - 1, iy - 1);
  };
  DisjointSets sets(static_cast<std::size_t>(px) * py);
  auto id = [&](int ix, int iy) { return static_cast<std::size_t>(iy) * px + ix; };
  for (int iy = 0; iy < py; ++iy) {
    for (int ix = 0; ix < px; ++ix) {
      if (!bg_at(ix, iy)) continue;
      for (auto [dx, dy] : {std::pair{1, 0}, {0, 1}, {1, 1}, {-1, 1}}) {
        const int jx = ix + dx, jy = iy + dy;
        if (jx >= 0 && jx < px && jy < py && bg_at(jx, jy)) sets.unite(id(ix, iy), id(jx, jy));
      }
    }
  }
  int comps = 0;
  for (int iy = 0; iy < py; ++iy)
    for (int ix = 0; ix < px; ++ix)
      if (bg_at(ix, iy) && sets.find(id(ix, iy)) == id(ix, iy)) ++comps;
  return comps - 1;  // ring ensures at least one background component
}

PerimeterLengths perimeter_inf(const BinaryImage& img) {
  const int nx = img.dims.nx, ny = img.dims.ny;
  long long flips_u1 = 0, flips_u2 = 0;
  // Two-sided counts: every boundary edge between a set and a clear pixel is
  // counted once. Bounded mode starts the scan one pixel outside so edges on
  // the image border are included.
  const int x_lo = img.mode == BoundaryMode::Torus ? 0 : -1;
  const int y_lo = img.mode == BoundaryMode::Torus ? 0 : -1;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = x_lo; ix < nx; ++ix)
      if (img.at(ix, iy) != img.at(ix + 1, iy)) ++flips_u1;
  for (int iy = y_lo; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      if (img.at(ix, iy) != img.at(ix, iy + 1)) ++flips_u2;

  PerimeterLengths per;
  per.per_u1 = img.eps * static_cast<double>(flips_u1);
  per.per_u2 = img.eps * static_cast<double>(flips_u2);
  per.per_inf = per.per_u1 + per.per_u2;
  return per;
}

double area(const BinaryImage& img) {
  return img.eps * img.eps * static_cast<double>(img.count_set());
}

double polyvariogram(const BinaryImage& img, std::span<const LatticeShift> in_shifts,
                     std::span<const LatticeShift> out_shifts) {
  const int nx = img.dims.nx, ny = img.dims.ny;

  int x_lo = 0, x_hi = nx - 1, y_lo = 0, y_hi = ny - 1;
  if (img.mode == BoundaryMode::Bounded) {
    if (in_shifts.empty())
      throw std::invalid_argument(
          "polyvariogram: in_shifts must be nonempty in bounded mode (the matching "
          "set would be infinite)");
    // bit(x - s) = 1 forces x - s onto the grid, which bounds the scan window.
    x_lo = std::numeric_limits<int>::min();
    x_hi = std::numeric_limits<int>::max();
    y_lo = x_lo;
    y_hi = x_hi;
    for (const LatticeShift& s : in_shifts) {
      x_lo = std::max(x_lo, s.dx);
      x_hi = std::min(x_hi, nx - 1 + s.dx);
      y_lo = std::max(y_lo, s.dy);
      y_hi = std::min(y_hi, ny - 1 + s.dy);
    }
    if (x_lo > x_hi || y_lo > y_hi) return 0.0;
  }

  long long count = 0;
  for (int iy = y_lo; iy <= y_hi; ++iy) {
    for (int ix = x_lo; ix <= x_hi; ++ix) {
      bool match = true;
      for (const LatticeShift& s : in_shifts)
        if (!img.at(ix - s.dx, iy - s.dy)) {
          match = false;
          break;
        }
      if (!match) continue;
      for (const LatticeShift& t : out_shifts)
        if (img.at(ix - t.dx, iy - t.dy)) {
          match = false;
          break;
        }
      if (match) ++count;
    }
  }
  return img.eps * img.eps * static_cast<double>(count);
}

CheckerboardCells checkerboard_cells(const BinaryImage& img) {
  // A qualifying 2x2 cell needs both diagonal pixels set, so in bounded mode
  // the cell must sit entirely inside the grid; in torus mode cells wrap.
  const int nx = img.dims.nx, ny = img.dims.ny;
  const int x_hi = img.mode == BoundaryMode::Torus ? nx : nx - 1;
  const int y_hi = img.mode == BoundaryMode::Torus ? ny : ny - 1;
  CheckerboardCells cells;
  for (int iy = 0; iy < y_hi; ++iy) {
    for (int ix = 0; ix < x_hi; ++ix) {
      const bool bl = img.get(ix, iy);
      const bool br = img.at(ix + 1, iy);
      const bool tl = img.at(ix, iy + 1);
      const bool tr = img.at(ix + 1, iy + 1);
      if (tl && br && !bl && !tr) ++cells.anti;
      if (bl && tr && !tl && !br) ++cells.main;
    }
  }
  return cells;
}

TopologyReport analyze(const BinaryImage& img) {
  TopologyReport report;
  report.dims = img.dims;
  report.eps = img.eps;
  report.mode = img.mode;
  report.configs = config_counts(img);
  report.chi_bicov = report.configs.n_plus - report.configs.n_minus;
  report.chi_complex = chi_complex(img);
  report.components_4 = components(img, 4);
  report.holes_8 = holes(img);
  report.per = perimeter_inf(img);
  report.area = area(img);
  report.cells = checkerboard_cells(img);
  return report;
}

}  // namespace exctop
