#pragma once

#include "projmod/actions.hpp"
#include "projmod/algebra.hpp"

namespace projmod {

/// An n x n matrix over a backend algebra. Row-major entries, value
/// semantics, all entries over one backend.
class MatrixElement {
 public:
  MatrixElement() = default;
  MatrixElement(int n, BackendPtr backend);  // zero matrix

  static MatrixElement identity(int n, BackendPtr backend);
  static MatrixElement zero(int n, BackendPtr backend);

  int n() const { return n_; }
  const BackendPtr& backend() const { return backend_; }
  const AlgebraElement& at(int i, int j) const {
    return entries_[static_cast<std::size_t>(i) * n_ + j];
  }
  void set(int i, int j, AlgebraElement v);
  /// Largest entry degree (torus kinds).
  int max_degree() const;

  friend MatrixElement operator+(const MatrixElement& x,
                                 const MatrixElement& y);
  friend MatrixElement operator-(const MatrixElement& x,
                                 const MatrixElement& y);
  friend MatrixElement operator-(const MatrixElement& x);
  friend MatrixElement operator*(const MatrixElement& x,
                                 const MatrixElement& y);
  friend MatrixElement operator*(Complex c, const MatrixElement& x);
  friend MatrixElement operator*(const MatrixElement& x, Complex c);
  friend MatrixElement operator*(const AlgebraElement& a,
                                 const MatrixElement& x);

 private:
  int n_ = 0;
  BackendPtr backend_;
  std::vector<AlgebraElement> entries_;
};

/// Induced max-row-sum norm over the entry norms (submultiplicative).
double norm(const MatrixElement& x);

MatrixElement adjoint(const MatrixElement& x);

/// Inverse with verified two-sided residual <= tol.
/// Torus: pointwise numeric inversion on the sampling grid, transformed
/// back. NCTorus: Newton-Schulz on M_n(A). Matrix: flattened dense solve.
/// Throws NotInvertible.
MatrixElement inverse(const MatrixElement& x);

/// Entrywise derivation action (satisfies the Leibniz rule on products).
MatrixElement apply(const Derivation& d, const MatrixElement& x);

/// Entrywise automorphism action M_n(psi) (multiplicative, unital).
MatrixElement apply(const Automorphism& psi, const MatrixElement& x);

/// Pad with zeros to size N, keeping x as the top-left block. Nonunital
/// ring homomorphism; corner products commute with the padding.
MatrixElement embed_tilde(const MatrixElement& x, int N);

/// Top-left m x m block.
MatrixElement top_left(const MatrixElement& x, int m);

/// Two-sided block assembly [[a, b], [c, d]] of equal sizes.
MatrixElement block2(const MatrixElement& a, const MatrixElement& b,
                     const MatrixElement& c, const MatrixElement& d);

namespace detail {
/// Verification-only product (band cap not enforced); see algebra.hpp.
MatrixElement mat_mul_unchecked(const MatrixElement& x,
                                const MatrixElement& y);
}  // namespace detail

}  // namespace projmod
