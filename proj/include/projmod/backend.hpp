#pragma once

#include <memory>
#include <string>

#include "projmod/errors.hpp"

namespace projmod {

enum class BackendKind {
  Torus,    ///< band-limited functions on T^d, plain convolution product
  NCTorus,  ///< twisted convolution algebra on Z^2 (quantum torus)
  Matrix    ///< dense complex d x d matrices
};

/// Configuration of a concrete algebra backend. Immutable after creation;
/// every element keeps a shared reference to its config.
struct BackendConfig {
  BackendKind kind = BackendKind::Torus;
  int dim = 1;           ///< torus dimensions, or matrix size
  double theta = 0.0;    ///< deformation parameter (nctorus, dim = 2 only)
  int degree = 1;        ///< retained Fourier band: |k|_inf <= degree
  int max_degree = 2;    ///< hard cap for intermediate degree growth
  double tol = 1e-9;     ///< residual tolerance for inversions etc.

  bool operator==(const BackendConfig&) const = default;
};

using BackendPtr = std::shared_ptr<const BackendConfig>;

/// Validates invariants (max_degree >= 2*degree, dims supported) and
/// freezes the configuration.
BackendPtr make_backend(BackendConfig cfg);

BackendPtr make_torus(int dim, int degree, int max_degree, double tol = 1e-9);
BackendPtr make_nctorus(double theta, int degree, int max_degree,
                        double tol = 1e-9);
BackendPtr make_matrix_backend(int dim, double tol = 1e-9);

inline bool same_backend(const BackendPtr& a, const BackendPtr& b) {
  return a == b || (a && b && *a == *b);
}

void require_same_backend(const BackendPtr& a, const BackendPtr& b);

std::string to_string(BackendKind kind);

}  // namespace projmod
