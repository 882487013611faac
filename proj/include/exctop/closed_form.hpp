#pragma once

#include "exctop/window.hpp"

namespace exctop {

/// Which normalization the chi(W) window term of the mean-value formulas
/// uses. The source derivation writes Phi(lambda) for the half-line integral
/// (2*pi)^{-1/2} * integral_0^lambda exp(-t^2/2) dt, which equals
/// normal_cdf(lambda) - 1/2; substituting it literally is inconsistent with
/// the lambda -> +inf limit (the excursion fills the window, so the expected
/// functionals must approach the window's own functionals). The consistent
/// reading replaces it with the standard normal CDF. We default to the CDF
/// and keep the literal variant available so both can be reported.
enum class PhiConvention {
  NormalCdf,  // chi(W) * normal_cdf(lambda)  [default, limit-consistent]
  PaperPhi,   // literal printed form, paper_phi(lambda) based
};

double normal_cdf(double lambda);

/// (2*pi)^{-1/2} * integral_0^lambda exp(-t^2/2) dt = normal_cdf(lambda) - 1/2.
double paper_phi(double lambda);

/// Mean Euler characteristic per unit area of the excursion {f <= lambda} of
/// a C^{1,1} stationary isotropic centered unit-variance Gaussian field with
/// second spectral moment mu:
///   -mu * lambda * exp(-lambda^2/2) / (2*pi)^{3/2}.
/// Throws DomainError unless mu > 0 and lambda is finite.
double ec_density(double mu, double lambda);

/// Mean directional perimeter per unit area (each axis direction):
///   sqrt(mu)/pi * exp(-lambda^2/2).
double per_u_density(double mu, double lambda);

/// Mean L-infinity perimeter per unit area: 2 * per_u_density.
double per_inf_density(double mu, double lambda);

/// Mean excursion volume fraction: P(f(0) <= lambda) = normal_cdf(lambda).
double vol_density(double lambda);

struct GaussianDensities {
  double lambda = 0.0;
  double mu = 0.0;
  double ec = 0.0;
  double per_u = 0.0;
  double per_inf = 0.0;
  double vol = 0.0;
};

GaussianDensities gaussian_densities(double mu, double lambda);

struct ExpectedFunctionals {
  double vol = 0.0;
  double per_inf = 0.0;
  double chi = 0.0;
};

/// Mean functionals of the excursion intersected with a finite window W:
///   E Vol  = Vol(W) * vbar
///   E Per  = Vol(W) * per_inf_density + Per_inf(W) * vbar
///   E chi  = Vol(W) * ec_density
///          + 1/4 * (Per_u2(W) * per_u + Per_u1(W) * per_u)
///          + chi(W) * vbar
/// where vbar = normal_cdf(lambda) under NormalCdf. Under PaperPhi the
/// printed form is reproduced literally: vbar = paper_phi(lambda) and the
/// chi(W) term gains an extra (2*pi)^{-1/2} factor.
ExpectedFunctionals expected_functionals(const Window& w, double mu, double lambda,
                                         PhiConvention conv = PhiConvention::NormalCdf);

}  // namespace exctop
