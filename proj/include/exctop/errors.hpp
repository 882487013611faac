#pragma once

#include <stdexcept>
#include <string>

namespace exctop {

/// Covariance model is not twice differentiable at the origin, so the second
/// spectral moment does not exist in the classical sense.
struct RegularityError : std::runtime_error {
  explicit RegularityError(const std::string& what) : std::runtime_error(what) {}
};

/// Circulant spectrum came out with negative eigenvalues beyond the clamping
/// tolerance; the requested torus cannot carry the requested covariance.
struct EmbeddingError : std::runtime_error {
  explicit EmbeddingError(const std::string& what) : std::runtime_error(what) {}
};

/// Dense covariance matrix could not be Cholesky-factorized even after
/// diagonal jitter.
struct FactorizationError : std::runtime_error {
  explicit FactorizationError(const std::string& what) : std::runtime_error(what) {}
};

/// Observation window does not satisfy the polyrectangle restrictions
/// (empty, degenerate rectangle, or two rectangles sharing a corner point).
struct InvalidWindowError : std::runtime_error {
  explicit InvalidWindowError(const std::string& what) : std::runtime_error(what) {}
};

/// Window extends past the pixel extent of the image it is applied to.
struct WindowOutOfRangeError : std::runtime_error {
  explicit WindowOutOfRangeError(const std::string& what) : std::runtime_error(what) {}
};

/// Closed-form evaluated outside its domain (e.g. mu <= 0).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed PBM/PGM input; message names the byte offset of the problem.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Experiment config file failed validation; message lists every bad field.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace exctop
