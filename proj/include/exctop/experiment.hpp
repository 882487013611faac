#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "exctop/closed_form.hpp"
#include "exctop/covariance.hpp"
#include "exctop/field.hpp"
#include "exctop/grid.hpp"
#include "exctop/window.hpp"

namespace exctop {

/// Everything a Monte Carlo run needs, parsed from a flat key/value file.
struct ExperimentConfig {
  CovarianceModel model;
  GridDims dims;
  double eps = 0.0;
  std::vector<double> lambdas;
  int replicates = 0;
  std::uint64_t seed = 0;
  BoundaryMode mode = BoundaryMode::Torus;
  std::vector<Window> windows;  // bounded mode only; empty = full pixel extent
  std::vector<int> strides;     // convergence sweeps only
  int threads = 0;              // 0 = EXCTOP_THREADS env var, then hardware
  bool allow_c1 = false;        // force the limit spectral moment for matern32
  PhiConvention phi = PhiConvention::NormalCdf;
};

/// Parses and validates a config file. Accumulates problems and reports all
/// of them in a single ConfigError rather than stopping at the first.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Parses "x0,x1,y0,y1[;x0,x1,y0,y1]..." (one quadruple per rectangle) into
/// a Window. Shared by the config format and the CLI. Throws ConfigError.
Window parse_window_spec(const std::string& spec);

/// One summary cell: Monte Carlo aggregate of a functional at one level.
struct StatRow {
  double lambda = 0.0;
  std::string functional;  // "chi" | "per_inf" | "vol"
  double mean = 0.0;
  double sd = 0.0;         // sample standard deviation over replicates
  double se = 0.0;         // sd / sqrt(replicates)
  double predicted = 0.0;  // closed-form target
  double z = 0.0;          // (mean - predicted) / se
};

struct SummaryStats {
  std::vector<StatRow> rows;  // lambda outer (config order), functional inner
};

/// Symmetric aggregation of replicate values; the result is invariant under
/// permutation of the samples up to floating-point associativity, and we pin
/// the summation order to the replicate index so results do not depend on
/// the thread count.
StatRow aggregate(double lambda, const std::string& functional,
                  const std::vector<double>& samples, double predicted);

struct RunResult {
  double mu = 0.0;
  /// Torus mode: a single table of densities (totals / torus area).
  /// Bounded mode: one table of window totals per window.
  std::vector<SummaryStats> tables;
};

/// Monte Carlo estimate of the mean functionals against their closed forms.
/// Deterministic given the config: replicate r uses stream mix(seed, r).
/// A failing replicate aborts the run; nothing is silently skipped.
RunResult run(const ExperimentConfig& config);

/// Paired between-window contrast: chi difference (first window minus
/// second) per replicate, aggregated against the predicted difference.
struct WindowTermRow {
  double lambda = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
  double predicted = 0.0;
  double z = 0.0;
};

struct WindowTermResult {
  RunResult per_window;
  std::vector<WindowTermRow> chi_diff;
};

/// Bounded-mode experiment isolating the boundary terms of the window
/// decomposition. Requires exactly >= 2 windows, each at least 3*ell away
/// from the cropped field's pixel extent so edge effects cannot leak in.
WindowTermResult window_term_experiment(const ExperimentConfig& config);

/// One row of a digitization-convergence sweep at a fixed stride and level.
struct SweepRow {
  int stride = 1;
  double eps = 0.0;
  double lambda = 0.0;
  double chi_mean = 0.0;
  double components4_mean = 0.0;
  double holes8_mean = 0.0;
  double anti_mean = 0.0;
  double main_mean = 0.0;
  double cells_per_pixel = 0.0;  // (anti+main) / pixel count of the subsampled grid
};

/// Couples all strides to the same realizations: each replicate is sampled
/// once at the finest grid and subsampled. Strides are reported in config
/// order (convention: coarsest first, so eps decreases down the table).
std::vector<SweepRow> convergence_sweep(const ExperimentConfig& config);

/// Sweep core over caller-provided fields; make_field(r) must return the
/// finest-grid field for replicate r.
std::vector<SweepRow> sweep_fields(const std::function<FieldSample(int)>& make_field,
                                   int replicates, const std::vector<int>& strides,
                                   const std::vector<double>& lambdas, int threads = 0);

/// Thread count resolution: request > 0 wins, then EXCTOP_THREADS, then
/// std::thread::hardware_concurrency().
int resolve_threads(int requested);

}  // namespace exctop
