#pragma once

#include <span>
#include <vector>

#include "exctop/binary_image.hpp"

namespace exctop {

/// Lattice shift in pixel units along (u1, u2).
struct LatticeShift {
  int dx = 0;
  int dy = 0;
};

/// Three-point configuration counts behind the bicovariogram estimator:
///   n_plus  = #{x : bit(x)=1, bit(x+u1)=0, bit(x+u2)=0}
///   n_minus = #{x : bit(x)=0, bit(x-u1)=1, bit(x-u2)=1}
struct ConfigCounts {
  long long n_plus = 0;
  long long n_minus = 0;
};

struct PerimeterLengths {
  double per_u1 = 0.0;
  double per_u2 = 0.0;
  double per_inf = 0.0;  // per_u1 + per_u2
};

/// 2x2 cells whose diagonal pixel pair is set and anti-pair clear.
/// "anti" = top-left + bottom-right set (the pair the bicovariogram counter
/// treats as disconnected), "main" = bottom-left + top-right set.
/// Their total is the digital proxy for the entanglement-pair count.
struct CheckerboardCells {
  long long anti = 0;
  long long main = 0;
};

/// Euler characteristic by three-point configuration counts: n_plus - n_minus.
/// Exact for any binary image (equals chi of the 4-adjacency cubical complex
/// minus the anti-diagonal cell count; see chi_complex / checkerboard_cells).
long long chi_bicov(const BinaryImage& img);

ConfigCounts config_counts(const BinaryImage& img);

/// Euler characteristic of the cubical complex spanned by set pixels:
/// vertices - (4-adjacent pairs) + (full 2x2 blocks).
long long chi_complex(const BinaryImage& img);

/// Connected components of the foreground; adjacency must be 4 or 8.
int components(const BinaryImage& img, int adjacency);

/// Bounded holes of the foreground: background 8-components not connected to
/// the outer region. In torus mode there is no outer region; the count is
/// (background components - 1), which callers should read with care.
int holes(const BinaryImage& img);

/// Two-sided directional flip counts scaled to world length:
/// per_u1 = eps * #{x : bit(x) != bit(x + u1)}, boundary included in bounded
/// mode. Converges to the L-infinity perimeter of the underlying excursion.
PerimeterLengths perimeter_inf(const BinaryImage& img);

/// Foreground area in world units: eps^2 * count_set.
double area(const BinaryImage& img);

/// Rectangle-indexed polyvariogram evaluated on the lattice:
/// eps^2 * #{x : bit(x - s) = 1 for all s in in_shifts,
///            bit(x - t) = 0 for all t in out_shifts}.
/// Bounded mode scans all integer x (outside pixels read background) and
/// requires in_shifts nonempty, otherwise the count would be infinite.
double polyvariogram(const BinaryImage& img, std::span<const LatticeShift> in_shifts,
                     std::span<const LatticeShift> out_shifts);

CheckerboardCells checkerboard_cells(const BinaryImage& img);

/// Everything the analyzers report about one binary image.
struct TopologyReport {
  GridDims dims;
  double eps = 1.0;
  BoundaryMode mode = BoundaryMode::Bounded;
  long long chi_bicov = 0;
  long long chi_complex = 0;
  ConfigCounts configs;
  int components_4 = 0;
  int holes_8 = 0;
  PerimeterLengths per;
  double area = 0.0;
  CheckerboardCells cells;
};

TopologyReport analyze(const BinaryImage& img);

}  // namespace exctop
