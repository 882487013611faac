#include "exctop/field.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "exctop/errors.hpp"
#include "exctop/rng.hpp"

namespace exctop {
namespace {

// FFTW's planner is not thread-safe; serialize plan creation/destruction.
std::mutex g_fftw_planner_mutex;

void check_dims(GridDims dims, int min_side, const char* who) {
  if (dims.nx < min_side || dims.ny < min_side)
    throw std::invalid_argument(std::string(who) + ": dims must be at least " +
                                std::to_string(min_side) + "x" + std::to_string(min_side));
}

void check_eps(double eps, const char* who) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw std::invalid_argument(std::string(who) + ": eps must be positive and finite");
}

/// Covariance of the torus field: the isotropic model periodized over the
/// lattice of torus translates, truncated where sigma is below 1e-18.
double periodized_cov(const CovarianceModel& model, double dx, double dy, double lx,
                      double ly, double radius) {
  const int kx = static_cast<int>(std::ceil(radius / lx)) + 1;
  const int ky = static_cast<int>(std::ceil(radius / ly)) + 1;
  double total = 0.0;
  for (int jy = -ky; jy <= ky; ++jy) {
    const double ty = dy + jy * ly;
    for (int jx = -kx; jx <= kx; ++jx) {
      const double tx = dx + jx * lx;
      const double r = std::hypot(tx, ty);
      if (r <= radius) total += reduced_cov(model, r);
    }
  }
  return total;
}

}  // namespace

int next_fast_fft_size(int n) {
  for (int m = n;; ++m) {
    int k = m;
    for (int p : {2, 3, 5, 7})
      while (k % p == 0) k /= p;
    if (k == 1) return m;
  }
}

CirculantSampler::CirculantSampler(const CovarianceModel& model, GridDims dims, double eps)
    : model_(model), dims_(dims), eps_(eps) {
  check_dims(dims, 8, "CirculantSampler");
  check_eps(eps, "CirculantSampler");

  const int nx = dims.nx, ny = dims.ny;
  const std::size_t n = static_cast<std::size_t>(nx) * ny;
  const double lx = nx * eps, ly = ny * eps;
  const double radius = decay_radius(model, 1e-18);

  // First row of the block-circulant covariance: cov against lattice lag
  // (ix*eps, iy*eps), with lags wrapped by periodization.
  fftw_complex* in = fftw_alloc_complex(n);
  fftw_complex* out = fftw_alloc_complex(n);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const std::size_t m = static_cast<std::size_t>(iy) * nx + ix;
      in[m][0] = periodized_cov(model, ix * eps, iy * eps, lx, ly, radius);
      in[m][1] = 0.0;
    }
  }

  {
    std::lock_guard<std::mutex> lock(g_fftw_planner_mutex);
    plan_ = fftw_plan_dft_2d(ny, nx, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute_dft(plan_, in, out);

  double max_eig = 0.0, min_eig = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    max_eig = std::max(max_eig, out[m][0]);
    min_eig = std::min(min_eig, out[m][0]);
  }
  if (min_eig < -1e-9 * max_eig) {
    fftw_free(in);
    fftw_free(out);
    throw EmbeddingError("circulant spectrum has eigenvalue " + std::to_string(min_eig) +
                         " below -1e-9 * max (" + std::to_string(max_eig) +
                         "); torus too small for this covariance");
  }

  scaled_sqrt_eig_.resize(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t m = 0; m < n; ++m)
    scaled_sqrt_eig_[m] = std::sqrt(std::max(out[m][0], 0.0) * inv_n);

  fftw_free(in);
  fftw_free(out);
}

CirculantSampler::~CirculantSampler() {
  if (plan_ != nullptr) {
    std::lock_guard<std::mutex> lock(g_fftw_planner_mutex);
    fftw_destroy_plan(plan_);
  }
}

FieldSample CirculantSampler::sample(std::uint64_t stream_seed) const {
  const std::size_t n = static_cast<std::size_t>(dims_.nx) * dims_.ny;
  fftw_complex* in = fftw_alloc_complex(n);
  fftw_complex* out = fftw_alloc_complex(n);

  // X = Re FFT(sqrt(eig/N) * zeta) with zeta = a + ib, a,b iid N(0,1), has
  // exactly the torus covariance. Draw order is the storage order, so the
  // realization depends only on the stream seed.
  rng::Xoshiro256pp gen(stream_seed);
  for (std::size_t m = 0; m < n; ++m) {
    const double s = scaled_sqrt_eig_[m];
    in[m][0] = s * gen.normal();
    in[m][1] = s * gen.normal();
  }
  fftw_execute_dft(plan_, in, out);

  FieldSample field;
  field.dims = dims_;
  field.eps = eps_;
  field.origin = Vec2{0.0, 0.0};
  field.mode = BoundaryMode::Torus;
  field.seed = stream_seed;
  field.values.resize(n);
  for (std::size_t m = 0; m < n; ++m) field.values[m] = out[m][0];

  fftw_free(in);
  fftw_free(out);
  return field;
}

GridDims padded_torus_dims(const CovarianceModel& model, GridDims dims, double eps) {
  check_eps(eps, "padded_torus_dims");
  const double margin = std::max(3.0 * model.length_scale, 10.0 * eps);
  const int pad = static_cast<int>(std::ceil(margin / eps));
  return GridDims{next_fast_fft_size(dims.nx + pad), next_fast_fft_size(dims.ny + pad)};
}

FieldSample crop(const FieldSample& field, GridDims dims) {
  if (dims.nx > field.dims.nx || dims.ny > field.dims.ny || dims.nx < 1 || dims.ny < 1)
    throw std::invalid_argument("crop: target dims exceed source dims");
  FieldSample out;
  out.dims = dims;
  out.eps = field.eps;
  out.origin = field.origin;
  out.mode = BoundaryMode::Bounded;
  out.seed = field.seed;
  out.values.resize(static_cast<std::size_t>(dims.nx) * dims.ny);
  for (int iy = 0; iy < dims.ny; ++iy)
    for (int ix = 0; ix < dims.nx; ++ix)
      out.values[out.index(ix, iy)] = field.at(ix, iy);
  return out;
}

FieldSample sample_field(const CovarianceModel& model, GridDims dims, double eps,
                         std::uint64_t seed, BoundaryMode mode) {
  check_dims(dims, 8, "sample_field");
  check_eps(eps, "sample_field");
  if (mode == BoundaryMode::Torus) {
    CirculantSampler sampler(model, dims, eps);
    return sampler.sample(seed);
  }
  // Bounded: sample a torus with enough wrap-around separation that the crop
  // is (numerically) the restriction of a plane field to the rectangle.
  CirculantSampler sampler(model, padded_torus_dims(model, dims, eps), eps);
  return crop(sampler.sample(seed), dims);
}

FieldSample sample_field_dense(const CovarianceModel& model, GridDims dims, double eps,
                               std::uint64_t seed, BoundaryMode mode) {
  check_eps(eps, "sample_field_dense");
  if (dims.nx < 1 || dims.ny < 1 || dims.nx > 32 || dims.ny > 32)
    throw std::invalid_argument("sample_field_dense: dims limited to 32x32");

  const int nx = dims.nx, ny = dims.ny;
  const int n = nx * ny;
  const double lx = nx * eps, ly = ny * eps;
  const double radius = decay_radius(model, 1e-18);

  Eigen::MatrixXd cov(n, n);
  for (int p = 0; p < n; ++p) {
    const int px = p % nx, py = p / nx;
    for (int q = 0; q <= p; ++q) {
      const int qx = q % nx, qy = q / nx;
      double c;
      if (mode == BoundaryMode::Torus) {
        c = periodized_cov(model, (px - qx) * eps, (py - qy) * eps, lx, ly, radius);
      } else {
        c = reduced_cov(model, eps * std::hypot(px - qx, py - qy));
      }
      cov(p, q) = c;
      cov(q, p) = c;
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    cov.diagonal().array() += 1e-10;
    llt.compute(cov);
    if (llt.info() != Eigen::Success)
      throw FactorizationError(
          "dense covariance not positive definite even with 1e-10 jitter");
  }

  rng::Xoshiro256pp gen(seed);
  Eigen::VectorXd z(n);
  for (int p = 0; p < n; ++p) z(p) = gen.normal();
  const Eigen::VectorXd x = llt.matrixL() * z;

  FieldSample field;
  field.dims = dims;
  field.eps = eps;
  field.origin = Vec2{0.0, 0.0};
  field.mode = mode;
  field.seed = seed;
  field.values.assign(x.data(), x.data() + n);
  return field;
}

FieldSample field_from_function(const std::function<double(double, double)>& fn,
                                GridDims dims, double eps, Vec2 origin, BoundaryMode mode) {
  if (dims.nx < 1 || dims.ny < 1)
    throw std::invalid_argument("field_from_function: dims must be positive");
  check_eps(eps, "field_from_function");
  FieldSample field;
  field.dims = dims;
  field.eps = eps;
  field.origin = origin;
  field.mode = mode;
  field.seed = 0;
  field.values.resize(static_cast<std::size_t>(dims.nx) * dims.ny);
  for (int iy = 0; iy < dims.ny; ++iy)
    for (int ix = 0; ix < dims.nx; ++ix)
      field.values[field.index(ix, iy)] = fn(origin.x + ix * eps, origin.y + iy * eps);
  return field;
}

FieldSample subsample(const FieldSample& field, int stride) {
  if (stride < 1) throw std::invalid_argument("subsample: stride must be >= 1");
  GridDims out_dims;
  if (field.mode == BoundaryMode::Torus) {
    if (field.dims.nx % stride != 0 || field.dims.ny % stride != 0)
      throw std::invalid_argument(
          "subsample: stride must divide torus dims (got " + std::to_string(stride) +
          " for " + std::to_string(field.dims.nx) + "x" + std::to_string(field.dims.ny) + ")");
    out_dims = GridDims{field.dims.nx / stride, field.dims.ny / stride};
  } else {
    if ((field.dims.nx - 1) % stride != 0 || (field.dims.ny - 1) % stride != 0)
      throw std::invalid_argument(
          "subsample: stride must divide dims-1 in bounded mode (got " +
          std::to_string(stride) + " for " + std::to_string(field.dims.nx) + "x" +
          std::to_string(field.dims.ny) + ")");
    out_dims = GridDims{(field.dims.nx - 1) / stride + 1, (field.dims.ny - 1) / stride + 1};
  }

  FieldSample out;
  out.dims = out_dims;
  out.eps = field.eps * stride;
  out.origin = field.origin;
  out.mode = field.mode;
  out.seed = field.seed;
  out.values.resize(static_cast<std::size_t>(out_dims.nx) * out_dims.ny);
  for (int iy = 0; iy < out_dims.ny; ++iy)
    for (int ix = 0; ix < out_dims.nx; ++ix)
      out.values[out.index(ix, iy)] = field.at(ix * stride, iy * stride);
  return out;
}

}  // namespace exctop
