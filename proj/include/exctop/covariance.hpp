#pragma once

#include <string>

namespace exctop {

enum class CovarianceKind {
  SquaredExponential,  // sigma(r) = exp(-r^2 / (2 ell^2))
  Matern52,            // sigma(r) = (1 + a r + a^2 r^2 / 3) exp(-a r), a = sqrt(5)/ell
  Matern32,            // sigma(r) = (1 + a r) exp(-a r), a = sqrt(3)/ell  (C^1 only!)
};

/// Isotropic unit-variance covariance model with a single length scale.
struct CovarianceModel {
  CovarianceKind kind = CovarianceKind::SquaredExponential;
  double length_scale = 1.0;

  /// Matern-3/2 sample paths are C^1 but not C^{1,1}: the second spectral
  /// moment used by the closed forms is defined only as a limit and the
  /// mean-functional formulas are not justified for it. We keep the model
  /// as a negative control.
  bool regularity_violated() const { return kind == CovarianceKind::Matern32; }
};

/// Reduced covariance sigma(r) at lag distance r >= 0; sigma(0) = 1.
double reduced_cov(const CovarianceModel& model, double r);

/// Second spectral moment mu = -sigma''(0) = 2 * lim (1 - sigma(eps)) / eps^2.
/// Closed forms: SE -> 1/ell^2, Matern-5/2 -> 5/(3 ell^2),
/// Matern-3/2 -> 3/ell^2 (limit value; see regularity_violated()).
/// Throws RegularityError for Matern-3/2 unless allow_c1 is set.
double spectral_moment(const CovarianceModel& model, bool allow_c1 = false);

/// Distance beyond which sigma(r) < tol; used to truncate lattice
/// periodization sums.
double decay_radius(const CovarianceModel& model, double tol);

/// Parses "se" | "squared-exponential" | "matern52" | "matern32" (etc.).
/// Throws ConfigError on an unknown name or non-positive length scale.
CovarianceModel parse_model(const std::string& name, double length_scale);

/// Short stable name for manifests and sidecars ("se", "matern52", "matern32").
std::string model_name(const CovarianceModel& model);

}  // namespace exctop
