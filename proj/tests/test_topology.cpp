#include "exctop/topology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "exctop/rng.hpp"

using namespace exctop;

namespace {

/// Builds an image from rows written top-first ('#' = foreground).
BinaryImage from_art(const std::vector<std::string>& rows_top_first,
                     BoundaryMode mode = BoundaryMode::Bounded, double eps = 1.0) {
  BinaryImage img;
  img.dims = GridDims{static_cast<int>(rows_top_first.front().size()),
                      static_cast<int>(rows_top_first.size())};
  img.eps = eps;
  img.mode = mode;
  img.bits.assign(img.dims.cells(), 0);
  for (int row = 0; row < img.dims.ny; ++row) {
    const std::string& line = rows_top_first[row];
    REQUIRE(static_cast<int>(line.size()) == img.dims.nx);
    const int iy = img.dims.ny - 1 - row;
    for (int ix = 0; ix < img.dims.nx; ++ix)
      img.bits[img.index(ix, iy)] = line[ix] == '#' ? 1 : 0;
  }
  return img;
}

BinaryImage random_image(std::uint64_t seed, int nx, int ny, double density,
                         BoundaryMode mode) {
  BinaryImage img;
  img.dims = GridDims{nx, ny};
  img.eps = 1.0;
  img.mode = mode;
  img.bits.resize(img.dims.cells());
  rng::Xoshiro256pp gen(seed);
  for (auto& b : img.bits) b = gen.uniform01() < density ? 1 : 0;
  return img;
}

/// Flood-fill component count, written independently of the union-find code.
int oracle_components(const BinaryImage& img, int adjacency) {
  const int nx = img.dims.nx, ny = img.dims.ny;
  std::vector<char> seen(img.dims.cells(), 0);
  const std::array<std::pair<int, int>, 8> dirs = {
      {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
  const int ndirs = adjacency == 8 ? 8 : 4;

  int count = 0;
  for (int sy = 0; sy < ny; ++sy) {
    for (int sx = 0; sx < nx; ++sx) {
      if (!img.get(sx, sy) || seen[img.index(sx, sy)]) continue;
      ++count;
      std::queue<std::pair<int, int>> queue;
      queue.push({sx, sy});
      seen[img.index(sx, sy)] = 1;
      while (!queue.empty()) {
        auto [x, y] = queue.front();
        queue.pop();
        for (int d = 0; d < ndirs; ++d) {
          int jx = x + dirs[d].first, jy = y + dirs[d].second;
          if (img.mode == BoundaryMode::Torus) {
            jx = ((jx % nx) + nx) % nx;
            jy = ((jy % ny) + ny) % ny;
          } else if (jx < 0 || jy < 0 || jx >= nx || jy >= ny) {
            continue;
          }
          if (img.get(jx, jy) && !seen[img.index(jx, jy)]) {
            seen[img.index(jx, jy)] = 1;
            queue.push({jx, jy});
          }
        }
      }
    }
  }
  return count;
}

/// Bounded holes by flood fill over the complement with a one-pixel apron.
int oracle_holes_bounded(const BinaryImage& img) {
  BinaryImage padded;
  padded.dims = GridDims{img.dims.nx + 2, img.dims.ny + 2};
  padded.eps = img.eps;
  padded.mode = BoundaryMode::Bounded;
  padded.bits.assign(padded.dims.cells(), 0);
  for (int iy = 0; iy < img.dims.ny; ++iy)
    for (int ix = 0; ix < img.dims.nx; ++ix)
      padded.bits[padded.index(ix + 1, iy + 1)] = img.get(ix, iy) ? 1 : 0;
  return oracle_components(complement(padded), 8) - 1;
}

/// Direct shifted-indicator count, scanning a generous box.
double oracle_poly(const BinaryImage& img, const std::vector<LatticeShift>& in,
                   const std::vector<LatticeShift>& out) {
  int margin = 1;
  for (const auto& s : in) margin = std::max({margin, std::abs(s.dx), std::abs(s.dy)});
  for (const auto& t : out) margin = std::max({margin, std::abs(t.dx), std::abs(t.dy)});
  const int x_lo = img.mode == BoundaryMode::Torus ? 0 : -margin;
  const int y_lo = img.mode == BoundaryMode::Torus ? 0 : -margin;
  const int x_hi = img.mode == BoundaryMode::Torus ? img.dims.nx : img.dims.nx + margin;
  const int y_hi = img.mode == BoundaryMode::Torus ? img.dims.ny : img.dims.ny + margin;
  long long count = 0;
  for (int iy = y_lo; iy < y_hi; ++iy)
    for (int ix = x_lo; ix < x_hi; ++ix) {
      bool match = true;
      for (const auto& s : in) match = match && img.at(ix - s.dx, iy - s.dy);
      for (const auto& t : out) match = match && !img.at(ix - t.dx, iy - t.dy);
      if (match) ++count;
    }
  return img.eps * img.eps * static_cast<double>(count);
}

long long anti_cells(const BinaryImage& img) { return checkerboard_cells(img).anti; }

}  // namespace

TEST_CASE("empty and full images") {
  for (const BoundaryMode mode : {BoundaryMode::Bounded, BoundaryMode::Torus}) {
    BinaryImage empty = random_image(1, 8, 8, 0.0, mode);
    CHECK(chi_bicov(empty) == 0);
    CHECK(chi_complex(empty) == 0);
    CHECK(components(empty, 4) == 0);
    CHECK(holes(empty) == 0);
    CHECK(perimeter_inf(empty).per_inf == 0.0);
    CHECK(area(empty) == 0.0);
  }

  BinaryImage full = random_image(1, 8, 8, 2.0, BoundaryMode::Torus);
  // A full torus is the torus: chi = 0 and there is no boundary.
  CHECK(chi_bicov(full) == 0);
  CHECK(chi_complex(full) == 0);
  CHECK(components(full, 4) == 1);
  CHECK(holes(full) == 0);
  CHECK(perimeter_inf(full).per_inf == 0.0);
  CHECK(area(full) == 64.0);

  full.mode = BoundaryMode::Bounded;
  // A full bounded grid is a filled square: chi = 1, border counted.
  CHECK(chi_bicov(full) == 1);
  CHECK(chi_complex(full) == 1);
  CHECK(holes(full) == 0);
  CHECK(perimeter_inf(full).per_u1 == doctest::Approx(2.0 * 8));
  CHECK(perimeter_inf(full).per_u2 == doctest::Approx(2.0 * 8));
}

TEST_CASE("single pixel and eps scaling") {
  BinaryImage img = random_image(1, 5, 5, 0.0, BoundaryMode::Bounded);
  img.eps = 0.5;
  img.bits[img.index(2, 2)] = 1;
  const TopologyReport r = analyze(img);
  CHECK(r.chi_bicov == 1);
  CHECK(r.chi_complex == 1);
  CHECK(r.configs.n_plus == 1);
  CHECK(r.configs.n_minus == 0);
  CHECK(r.components_4 == 1);
  CHECK(r.holes_8 == 0);
  CHECK(r.per.per_u1 == doctest::Approx(2.0 * 0.5));
  CHECK(r.per.per_u2 == doctest::Approx(2.0 * 0.5));
  CHECK(r.per.per_inf == doctest::Approx(2.0));
  CHECK(r.area == doctest::Approx(0.25));
}

TEST_CASE("donut has euler characteristic zero") {
  const BinaryImage donut = from_art({"###",  //
                                      "#.#",  //
                                      "###"});
  const TopologyReport r = analyze(donut);
  CHECK(r.chi_bicov == 0);
  CHECK(r.chi_complex == 0);
  CHECK(r.components_4 == 1);
  CHECK(r.holes_8 == 1);
  CHECK(r.components_4 - r.holes_8 == r.chi_complex);
  CHECK(r.per.per_u1 == doctest::Approx(8.0));
  CHECK(r.per.per_u2 == doctest::Approx(8.0));
  CHECK(r.area == doctest::Approx(8.0));
  CHECK(r.cells.anti == 0);
  CHECK(r.cells.main == 0);
}

TEST_CASE("l tromino fixture") {
  const BinaryImage ell = from_art({"#.",  //
                                    "#.",  //
                                    "##"});
  const TopologyReport r = analyze(ell);
  CHECK(r.configs.n_plus == 2);
  CHECK(r.configs.n_minus == 1);
  CHECK(r.chi_bicov == 1);
  CHECK(r.chi_complex == 1);
  CHECK(r.per.per_u1 == doctest::Approx(6.0));
  CHECK(r.per.per_u2 == doctest::Approx(4.0));
  CHECK(r.area == doctest::Approx(4.0));
}

TEST_CASE("diagonal pixel pairs and checkerboard cells") {
  // Anti-diagonal pair (world top-left + bottom-right): the configuration the
  // three-point counter treats as one connected blob, chi 1.
  const BinaryImage anti = from_art({"#.",  //
                                     ".#"});
  CHECK(chi_bicov(anti) == 1);
  CHECK(chi_complex(anti) == 2);
  CHECK(checkerboard_cells(anti).anti == 1);
  CHECK(checkerboard_cells(anti).main == 0);
  CHECK(components(anti, 4) == 2);
  CHECK(components(anti, 8) == 1);
  CHECK(chi_bicov(anti) == chi_complex(anti) - anti_cells(anti));

  // Main-diagonal pair: counted as two pieces, chi 2.
  const BinaryImage main_pair = from_art({".#",  //
                                          "#."});
  CHECK(chi_bicov(main_pair) == 2);
  CHECK(chi_complex(main_pair) == 2);
  CHECK(checkerboard_cells(main_pair).anti == 0);
  CHECK(checkerboard_cells(main_pair).main == 1);
  CHECK(chi_bicov(main_pair) == chi_complex(main_pair) - anti_cells(main_pair));
}

TEST_CASE("checkerboard wraps on the torus") {
  const BinaryImage board = from_art({"#.",  //
                                      ".#"},
                                     BoundaryMode::Torus);
  const CheckerboardCells cells = checkerboard_cells(board);
  CHECK(cells.anti == 2);
  CHECK(cells.main == 2);
  CHECK(chi_complex(board) == 2);
  CHECK(chi_bicov(board) == 0);
  CHECK(chi_bicov(board) == chi_complex(board) - cells.anti);

  // Same bits, bounded: only the single interior cell is counted.
  const BinaryImage bounded = from_art({"#.",  //
                                        ".#"});
  CHECK(checkerboard_cells(bounded).anti == 1);
  CHECK(checkerboard_cells(bounded).main == 0);
}

TEST_CASE("holes fixtures") {
  const BinaryImage open_c = from_art({"###",  //
                                       "#..",  //
                                       "###"});
  CHECK(holes(open_c) == 0);
  CHECK(chi_complex(open_c) == 1);

  // A diagonal breach lets the 8-connected background escape.
  const BinaryImage breached = from_art({".##",  //
                                         "#.#",  //
                                         "###"});
  CHECK(holes(breached) == 0);
  CHECK(components(breached, 4) == 1);
  CHECK(chi_bicov(breached) == 1);
  CHECK(chi_complex(breached) == 1);

  const BinaryImage two_holes = from_art({"#####",  //
                                          "#.#.#",  //
                                          "#####"});
  CHECK(holes(two_holes) == 2);
  CHECK(chi_bicov(two_holes) == -1);
  CHECK(components(two_holes, 4) - holes(two_holes) == chi_complex(two_holes));

  // Full torus: complement is empty, no holes to report.
  CHECK(holes(random_image(1, 6, 6, 2.0, BoundaryMode::Torus)) == 0);
}

TEST_CASE("components wrap on the torus only") {
  const BinaryImage stripe_ends = from_art({"...",  //
                                            "#.#",  //
                                            "..."});
  CHECK(components(stripe_ends, 4) == 2);
  BinaryImage wrapped = stripe_ends;
  wrapped.mode = BoundaryMode::Torus;
  CHECK(components(wrapped, 4) == 1);

  CHECK_THROWS_AS(components(stripe_ends, 6), std::invalid_argument);
}

TEST_CASE("torus stripe perimeter") {
  BinaryImage img = random_image(1, 8, 6, 0.0, BoundaryMode::Torus);
  img.eps = 0.25;
  for (int iy = 0; iy < 6; ++iy) img.bits[img.index(3, iy)] = 1;  // one full column
  const PerimeterLengths per = perimeter_inf(img);
  CHECK(per.per_u1 == doctest::Approx(0.25 * 2 * 6));
  CHECK(per.per_u2 == doctest::Approx(0.0));
  CHECK(chi_bicov(img) == 0);  // a cylinder band: chi 0
  CHECK(chi_complex(img) == 0);
}

TEST_CASE("identity chain on random images") {
  int trial = 0;
  for (const BoundaryMode mode : {BoundaryMode::Bounded, BoundaryMode::Torus}) {
    for (const double density : {0.05, 0.3, 0.5, 0.7, 0.95}) {
      for (int rep = 0; rep < 25; ++rep) {
        ++trial;
        rng::Xoshiro256pp size_rng(1000 + trial);
        const int nx = 1 + static_cast<int>(size_rng.next() % 32);
        const int ny = 1 + static_cast<int>(size_rng.next() % 32);
        const BinaryImage img = random_image(2000 + trial, nx, ny, density, mode);
        CAPTURE(trial);
        CAPTURE(nx);
        CAPTURE(ny);

        // chi by configuration counts == chi of the complex minus the
        // anti-diagonal cell correction, in both boundary modes.
        CHECK(chi_bicov(img) == chi_complex(img) - anti_cells(img));

        CHECK(components(img, 4) == oracle_components(img, 4));
        CHECK(components(img, 8) == oracle_components(img, 8));

        if (mode == BoundaryMode::Bounded) {
          CHECK(holes(img) == oracle_holes_bounded(img));
          // Digital Euler-Poincare formula.
          CHECK(chi_complex(img) == components(img, 4) - holes(img));
        }
      }
    }
  }
}

TEST_CASE("perimeter equals the polyvariogram flip counts") {
  for (const BoundaryMode mode : {BoundaryMode::Bounded, BoundaryMode::Torus}) {
    for (int rep = 0; rep < 10; ++rep) {
      BinaryImage img = random_image(31 + rep, 14, 11, 0.4, mode);
      img.eps = 0.5;
      const double e2 = img.eps * img.eps;
      const std::vector<LatticeShift> at_origin{{0, 0}}, at_left{{-1, 0}}, at_down{{0, -1}};

      const double rise_u1 = polyvariogram(img, at_origin, at_left);
      const double fall_u1 = polyvariogram(img, at_left, at_origin);
      const double rise_u2 = polyvariogram(img, at_origin, at_down);
      const double fall_u2 = polyvariogram(img, at_down, at_origin);

      const PerimeterLengths per = perimeter_inf(img);
      CHECK(per.per_u1 == doctest::Approx(img.eps * (rise_u1 + fall_u1) / e2));
      CHECK(per.per_u2 == doctest::Approx(img.eps * (rise_u2 + fall_u2) / e2));
    }
  }
}

TEST_CASE("configuration counts are polyvariogram evaluations") {
  for (const BoundaryMode mode : {BoundaryMode::Bounded, BoundaryMode::Torus}) {
    const BinaryImage img = random_image(97, 19, 13, 0.45, mode);
    const ConfigCounts counts = config_counts(img);
    // n_plus: bit(x)=1, bit(x+u1)=0, bit(x+u2)=0.
    const std::vector<LatticeShift> plus_in{{0, 0}};
    const std::vector<LatticeShift> plus_out{{-1, 0}, {0, -1}};
    // n_minus: bit(x)=0, bit(x-u1)=1, bit(x-u2)=1.
    const std::vector<LatticeShift> minus_in{{1, 0}, {0, 1}};
    const std::vector<LatticeShift> minus_out{{0, 0}};
    CHECK(counts.n_plus == std::llround(polyvariogram(img, plus_in, plus_out)));
    CHECK(counts.n_minus == std::llround(polyvariogram(img, minus_in, minus_out)));
  }
}

TEST_CASE("polyvariogram matches a brute-force oracle") {
  rng::Xoshiro256pp gen(555);
  for (int rep = 0; rep < 40; ++rep) {
    const BoundaryMode mode = rep % 2 == 0 ? BoundaryMode::Bounded : BoundaryMode::Torus;
    const BinaryImage img = random_image(700 + rep, 9, 9, 0.5, mode);
    std::vector<LatticeShift> in, out;
    const int n_in = 1 + static_cast<int>(gen.next() % 3);
    const int n_out = static_cast<int>(gen.next() % 3);
    for (int i = 0; i < n_in; ++i)
      in.push_back({static_cast<int>(gen.next() % 5) - 2, static_cast<int>(gen.next() % 5) - 2});
    for (int i = 0; i < n_out; ++i)
      out.push_back({static_cast<int>(gen.next() % 5) - 2, static_cast<int>(gen.next() % 5) - 2});
    CAPTURE(rep);
    CHECK(polyvariogram(img, in, out) == doctest::Approx(oracle_poly(img, in, out)));
  }
}

TEST_CASE("polyvariogram input validation") {
  const std::vector<LatticeShift> none;
  const std::vector<LatticeShift> at_origin{{0, 0}};
  const BinaryImage bounded = random_image(5, 6, 6, 0.5, BoundaryMode::Bounded);
  CHECK_THROWS_AS(polyvariogram(bounded, none, at_origin), std::invalid_argument);

  // On the torus an empty in-list is fine: this counts background pixels.
  const BinaryImage torus = random_image(5, 6, 6, 0.5, BoundaryMode::Torus);
  const double bg = polyvariogram(torus, none, at_origin);
  CHECK(bg == doctest::Approx(static_cast<double>(36 - torus.count_set())));
}

TEST_CASE("translation invariance on the torus") {
  const BinaryImage img = random_image(42, 16, 12, 0.5, BoundaryMode::Torus);
  BinaryImage rolled = img;
  const int dx = 5, dy = 7;
  for (int iy = 0; iy < 12; ++iy)
    for (int ix = 0; ix < 16; ++ix)
      rolled.bits[rolled.index((ix + dx) % 16, (iy + dy) % 12)] = img.bits[img.index(ix, iy)];

  const TopologyReport a = analyze(img);
  const TopologyReport b = analyze(rolled);
  CHECK(a.chi_bicov == b.chi_bicov);
  CHECK(a.chi_complex == b.chi_complex);
  CHECK(a.components_4 == b.components_4);
  CHECK(a.holes_8 == b.holes_8);
  CHECK(a.per.per_u1 == b.per.per_u1);
  CHECK(a.per.per_u2 == b.per.per_u2);
  CHECK(a.area == b.area);
  CHECK(a.cells.anti == b.cells.anti);
  CHECK(a.cells.main == b.cells.main);
}

TEST_CASE("disjoint unions add up in bounded mode") {
  const BinaryImage left = random_image(8, 7, 9, 0.5, BoundaryMode::Bounded);
  const BinaryImage right = random_image(9, 6, 9, 0.5, BoundaryMode::Bounded);

  BinaryImage both = random_image(0, 7 + 2 + 6, 9, 0.0, BoundaryMode::Bounded);
  for (int iy = 0; iy < 9; ++iy) {
    for (int ix = 0; ix < 7; ++ix) both.bits[both.index(ix, iy)] = left.bits[left.index(ix, iy)];
    for (int ix = 0; ix < 6; ++ix)
      both.bits[both.index(9 + ix, iy)] = right.bits[right.index(ix, iy)];
  }

  CHECK(chi_bicov(both) == chi_bicov(left) + chi_bicov(right));
  CHECK(chi_complex(both) == chi_complex(left) + chi_complex(right));
  CHECK(components(both, 4) == components(left, 4) + components(right, 4));
  CHECK(holes(both) == holes(left) + holes(right));
  CHECK(perimeter_inf(both).per_inf ==
        doctest::Approx(perimeter_inf(left).per_inf + perimeter_inf(right).per_inf));
  CHECK(area(both) == doctest::Approx(area(left) + area(right)));
}

TEST_CASE("analyze bundles the individual measurements") {
  const BinaryImage img = random_image(123, 21, 17, 0.5, BoundaryMode::Bounded);
  const TopologyReport r = analyze(img);
  CHECK(r.chi_bicov == chi_bicov(img));
  CHECK(r.chi_complex == chi_complex(img));
  CHECK(r.configs.n_plus == config_counts(img).n_plus);
  CHECK(r.configs.n_minus == config_counts(img).n_minus);
  CHECK(r.components_4 == components(img, 4));
  CHECK(r.holes_8 == holes(img));
  CHECK(r.per.per_inf == perimeter_inf(img).per_inf);
  CHECK(r.area == area(img));
  CHECK(r.cells.anti == checkerboard_cells(img).anti);
  CHECK(r.dims.nx == 21);
  CHECK(r.eps == 1.0);
  CHECK(r.mode == BoundaryMode::Bounded);
}
