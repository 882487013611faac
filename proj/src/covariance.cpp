#include "exctop/covariance.hpp"

#include <algorithm>
#include <cmath>

#include "exctop/errors.hpp"

namespace exctop {

double reduced_cov(const CovarianceModel& model, double r) {
  const double ell = model.length_scale;
  switch (model.kind) {
    case CovarianceKind::SquaredExponential: {
      const double s = r / ell;
      return std::exp(-0.5 * s * s);
    }
    case CovarianceKind::Matern52: {
      const double a = std::sqrt(5.0) / ell;
      const double ar = a * r;
      return (1.0 + ar + ar * ar / 3.0) * std::exp(-ar);
    }
    case CovarianceKind::Matern32: {
      const double ar = std::sqrt(3.0) / ell * r;
      return (1.0 + ar) * std::exp(-ar);
    }
  }
  return 0.0;  // unreachable
}

double spectral_moment(const CovarianceModel& model, bool allow_c1) {
  const double ell2 = model.length_scale * model.length_scale;
  switch (model.kind) {
    case CovarianceKind::SquaredExponential:
      return 1.0 / ell2;
    case CovarianceKind::Matern52:
      return 5.0 / (3.0 * ell2);
    case CovarianceKind::Matern32:
      if (!allow_c1)
        throw RegularityError(
            "matern32 paths are C^1 but not C^{1,1}; the closed-form mean "
            "functionals are not justified for this model (pass the "
            "C^1 override to force the limit value 3/ell^2)");
      return 3.0 / ell2;
  }
  return 0.0;  // unreachable
}

double decay_radius(const CovarianceModel& model, double tol) {
  // All three models decay monotonically, so double r until below tol.
  double r = model.length_scale;
  const double r_max = 1000.0 * model.length_scale;
  while (reduced_cov(model, r) >= tol && r < r_max) r *= 2.0;
  return r;
}

CovarianceModel parse_model(const std::string& name, double length_scale) {
  if (!(length_scale > 0.0) || !std::isfinite(length_scale))
    throw ConfigError("length scale must be positive and finite, got " +
                      std::to_string(length_scale));
  std::string key = name;
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  CovarianceModel model;
  model.length_scale = length_scale;
  if (key == "se" || key == "squared-exponential" || key == "gaussian") {
    model.kind = CovarianceKind::SquaredExponential;
  } else if (key == "matern52" || key == "matern-5/2" || key == "matern-52") {
    model.kind = CovarianceKind::Matern52;
  } else if (key == "matern32" || key == "matern-3/2" || key == "matern-32") {
    model.kind = CovarianceKind::Matern32;
  } else {
    throw ConfigError("unknown covariance model '" + name +
                      "' (expected se | matern52 | matern32)");
  }
  return model;
}

std::string model_name(const CovarianceModel& model) {
  switch (model.kind) {
    case CovarianceKind::SquaredExponential: return "se";
    case CovarianceKind::Matern52: return "matern52";
    case CovarianceKind::Matern32: return "matern32";
  }
  return "?";
}

}  // namespace exctop
