#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "exctop/covariance.hpp"
#include "exctop/grid.hpp"

// Forward declaration so this header does not drag fftw3.h everywhere.
struct fftw_plan_s;

namespace exctop {

/// One realization of a scalar field sampled at the pixel centers
/// origin + (ix*eps, iy*eps), 0 <= ix < nx, 0 <= iy < ny.
/// Row-major storage values[iy*nx + ix]; iy increases in the +y (u2)
/// direction. Image file formats are top-row-first, so I/O flips rows.
struct FieldSample {
  GridDims dims;
  double eps = 0.0;
  Vec2 origin;  // world coordinates of lattice point (0,0)
  BoundaryMode mode = BoundaryMode::Torus;
  std::uint64_t seed = 0;  // stream seed that produced the values; 0 if deterministic
  std::vector<double> values;

  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * dims.nx + ix;
  }
  double at(int ix, int iy) const { return values[index(ix, iy)]; }
};

/// Exact stationary Gaussian sampling on a flat torus by circulant spectral
/// synthesis. The torus covariance is the lattice periodization of the
/// isotropic model, so by Poisson summation its FFT eigenvalues are aliased
/// spectral-density samples and nonnegative up to rounding; negative rounding
/// residue within 1e-9 of the largest eigenvalue is clamped to zero, anything
/// worse raises EmbeddingError.
///
/// Same seed always produces the same field: the FFT size is fixed, plans use
/// FFTW_ESTIMATE (plan choice never affects values), and the Gaussian draws
/// come from our own fully specified generator.
class CirculantSampler {
 public:
  CirculantSampler(const CovarianceModel& model, GridDims dims, double eps);
  ~CirculantSampler();
  CirculantSampler(const CirculantSampler&) = delete;
  CirculantSampler& operator=(const CirculantSampler&) = delete;

  /// Thread-safe after construction: each call uses its own buffers and
  /// FFTW's new-array execute interface.
  FieldSample sample(std::uint64_t stream_seed) const;

  GridDims dims() const { return dims_; }
  double eps() const { return eps_; }

 private:
  CovarianceModel model_;
  GridDims dims_;
  double eps_;
  std::vector<double> scaled_sqrt_eig_;  // sqrt(eigenvalue / N), N = nx*ny
  fftw_plan_s* plan_ = nullptr;
};

/// Torus dimensions used to back a bounded-mode sample of the given size:
/// the requested grid plus a separation margin of max(3*ell, 10*eps),
/// rounded up to the next 7-smooth FFT size.
GridDims padded_torus_dims(const CovarianceModel& model, GridDims dims, double eps);

/// Smallest n' >= n whose prime factors are all <= 7.
int next_fast_fft_size(int n);

/// Rows [0, dims.ny) x cols [0, dims.nx) of a larger field, re-labelled as a
/// bounded sample. Used to realize bounded mode on top of torus synthesis.
FieldSample crop(const FieldSample& field, GridDims dims);

/// One-shot sampling front end. Torus mode samples the requested grid
/// directly; bounded mode samples a padded torus and crops, which is exactly
/// stationary (no edge effects from an approximate embedding).
FieldSample sample_field(const CovarianceModel& model, GridDims dims, double eps,
                         std::uint64_t seed, BoundaryMode mode);

/// Reference sampler by dense Cholesky factorization; dims up to 32x32.
/// Targets the same law as sample_field (torus mode uses the periodized
/// covariance). Adds 1e-10 diagonal jitter once if the factorization fails,
/// then raises FactorizationError.
FieldSample sample_field_dense(const CovarianceModel& model, GridDims dims, double eps,
                               std::uint64_t seed, BoundaryMode mode);

/// Deterministic field from an explicit function of world coordinates.
FieldSample field_from_function(const std::function<double(double, double)>& fn,
                                GridDims dims, double eps, Vec2 origin, BoundaryMode mode);

/// Every stride-th sample in both directions; eps scales by the stride.
/// Torus mode requires stride | n (the subsampled grid is again a torus);
/// bounded mode requires stride | (n - 1) (same world extent).
FieldSample subsample(const FieldSample& field, int stride);

}  // namespace exctop
