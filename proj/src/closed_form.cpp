#include "exctop/closed_form.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "exctop/errors.hpp"

namespace exctop {
namespace {

constexpr double kPi = std::numbers::pi;

void check_args(double mu, double lambda) {
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw DomainError("closed forms need mu > 0, got " + std::to_string(mu));
  if (!std::isfinite(lambda))
    throw DomainError("closed forms need a finite lambda");
}

}  // namespace

double normal_cdf(double lambda) { return 0.5 * std::erfc(-lambda / std::numbers::sqrt2); }

double paper_phi(double lambda) { return normal_cdf(lambda) - 0.5; }

double ec_density(double mu, double lambda) {
  check_args(mu, lambda);
  return -mu * lambda * std::exp(-0.5 * lambda * lambda) / std::pow(2.0 * kPi, 1.5);
}

double per_u_density(double mu, double lambda) {
  check_args(mu, lambda);
  return std::sqrt(mu) / kPi * std::exp(-0.5 * lambda * lambda);
}

double per_inf_density(double mu, double lambda) { return 2.0 * per_u_density(mu, lambda); }

double vol_density(double lambda) {
  if (!std::isfinite(lambda)) throw DomainError("vol_density needs a finite lambda");
  return normal_cdf(lambda);
}

GaussianDensities gaussian_densities(double mu, double lambda) {
  GaussianDensities d;
  d.lambda = lambda;
  d.mu = mu;
  d.ec = ec_density(mu, lambda);
  d.per_u = per_u_density(mu, lambda);
  d.per_inf = 2.0 * d.per_u;
  d.vol = vol_density(lambda);
  return d;
}

ExpectedFunctionals expected_functionals(const Window& w, double mu, double lambda,
                                         PhiConvention conv) {
  check_args(mu, lambda);
  const double vbar =
      conv == PhiConvention::NormalCdf ? normal_cdf(lambda) : paper_phi(lambda);
  const double per_u = per_u_density(mu, lambda);
  const double chi_w = static_cast<double>(w.euler());
  const double chi_term =
      conv == PhiConvention::NormalCdf ? chi_w * vbar
                                       : chi_w * vbar / std::sqrt(2.0 * kPi);

  ExpectedFunctionals e;
  e.vol = w.vol() * vbar;
  e.per_inf = w.vol() * 2.0 * per_u + w.per_inf() * vbar;
  e.chi = w.vol() * ec_density(mu, lambda) +
          0.25 * (w.per_u2() * per_u + w.per_u1() * per_u) + chi_term;
  return e;
}

}  // namespace exctop
