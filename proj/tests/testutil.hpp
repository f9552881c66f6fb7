#pragma once

#include <vector>

#include "projmod/idempotent.hpp"
#include "projmod/random.hpp"

namespace projmod::testutil {

// Backends at the desk scales used throughout the suite.
inline BackendPtr torus1(int degree = 8, int cap = 64) {
  return make_torus(1, degree, cap);
}
inline BackendPtr torus2(int degree = 8, int cap = 64) {
  return make_torus(2, degree, cap);
}
inline BackendPtr nctorus_golden(int degree = 6, int cap = 64) {
  return make_nctorus(0.6180339887, degree, cap);
}
inline BackendPtr matrix3() { return make_matrix_backend(3); }

inline AlgebraElement mono(const BackendPtr& b, std::vector<int> k,
                           Complex c = Complex(1.0, 0.0)) {
  return AlgebraElement::monomial(b, k, c);
}

inline double dist(const AlgebraElement& a, const AlgebraElement& b) {
  return norm(a - b);
}
inline double dist(const MatrixElement& a, const MatrixElement& b) {
  return norm(a - b);
}

// A non-constant idempotent near the rank-one projector: retraction of
// diag(1, 0, ...) plus a small Hermitian perturbation.
inline Idempotent soft_idempotent(const BackendPtr& b, int n, Rng& rng,
                                  double eps = 0.03) {
  MatrixElement seed(n, b);
  seed.set(0, 0, AlgebraElement::unit(b));
  const MatrixElement h = random_matrix(b, n, 1, eps, rng);
  seed = seed + h + adjoint(h);
  return retract_idempotent(seed);
}

}  // namespace projmod::testutil
