#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "projmod/backend.hpp"

namespace projmod {

using Complex = std::complex<double>;

/// An element of a concrete algebra backend: a band-limited Fourier
/// coefficient table (torus kinds) or a dense complex matrix.
///
/// Values are immutable after construction; all operations are pure
/// functions. Coefficient tables are kept canonical: sorted by packed
/// multi-index, with entries below 1e-15 times the largest modulus pruned.
class AlgebraElement {
 public:
  AlgebraElement() = default;

  static AlgebraElement zero(BackendPtr backend);
  static AlgebraElement unit(BackendPtr backend);
  /// c * e_k for torus kinds.
  static AlgebraElement monomial(BackendPtr backend, std::span<const int> k,
                                 Complex c = Complex(1.0, 0.0));
  /// c * 1.
  static AlgebraElement scalar(BackendPtr backend, Complex c);
  static AlgebraElement from_coeffs(
      BackendPtr backend,
      const std::vector<std::pair<std::vector<int>, Complex>>& coeffs);
  static AlgebraElement from_matrix(BackendPtr backend, Eigen::MatrixXcd m);

  const BackendPtr& backend() const { return backend_; }
  bool valid() const { return backend_ != nullptr; }
  bool is_torus_kind() const;

  /// Largest |k|_inf over retained coefficients (0 for matrix kind).
  int degree() const { return degree_; }

  Complex coeff(std::span<const int> k) const;
  const Eigen::MatrixXcd& matrix() const { return mat_; }

  /// Canonical packed table, sorted by key. Torus kinds only.
  const std::vector<std::pair<std::uint64_t, Complex>>& packed_coeffs() const {
    return coeffs_;
  }
  /// Coefficients as (multi-index, value) items, canonical order.
  std::vector<std::pair<std::vector<int>, Complex>> coeff_items() const;

  static std::uint64_t pack_index(std::span<const int> k);
  static void unpack_index(std::uint64_t key, int dim, int* out);

  friend AlgebraElement operator+(const AlgebraElement& a,
                                  const AlgebraElement& b);
  friend AlgebraElement operator-(const AlgebraElement& a,
                                  const AlgebraElement& b);
  friend AlgebraElement operator-(const AlgebraElement& a);
  friend AlgebraElement operator*(const AlgebraElement& a,
                                  const AlgebraElement& b);
  friend AlgebraElement operator*(Complex c, const AlgebraElement& a);
  friend AlgebraElement operator*(const AlgebraElement& a, Complex c);

 private:
  BackendPtr backend_;
  std::vector<std::pair<std::uint64_t, Complex>> coeffs_;  // torus kinds
  Eigen::MatrixXcd mat_;                                   // matrix kind
  int degree_ = 0;

  void canonicalize();
  friend AlgebraElement raw_from_parts(
      BackendPtr, std::vector<std::pair<std::uint64_t, Complex>>);
};

/// l1 coefficient norm (torus kinds, submultiplicative) or spectral norm
/// (matrix kind). The tolerance yardstick of the whole library.
double norm(const AlgebraElement& a);

/// Star involution: conjugate-reflected coefficients (with the twist
/// phase on the quantum torus) or the conjugate transpose.
AlgebraElement adjoint(const AlgebraElement& a);

/// Inverse with verified residual: ||a b - 1|| <= tol and ||b a - 1|| <= tol.
/// Torus: pointwise inversion on a uniform sampling grid, transformed back.
/// NCTorus: Newton-Schulz iteration seeded from the scaled adjoint.
/// Matrix: dense LU inverse.
/// Throws NotInvertible.
AlgebraElement inverse(const AlgebraElement& a);

/// Values of a torus-kind element on the uniform grid {j/G}^d, row-major
/// (last index fastest).
Eigen::VectorXcd grid_values(const AlgebraElement& a, int grid);

/// Band-limited element with the given values on the uniform grid.
/// Modes with |k|_inf <= band are retained (requires grid >= 2*band + 1).
AlgebraElement from_grid_values(const BackendPtr& backend,
                                const Eigen::VectorXcd& values, int grid,
                                int band);

/// Point evaluation of a torus-kind element (plain Fourier sum).
Complex evaluate(const AlgebraElement& a, std::span<const double> x);

/// Smallest 5-smooth integer >= m (grid sizes the FFT handles well).
int fft_friendly_size(int m);

namespace detail {
/// Same arithmetic as operator*, without the band-cap check. Only for
/// residual verification, where the product feeds a norm and never escapes.
AlgebraElement mul_unchecked(const AlgebraElement& a, const AlgebraElement& b);
}  // namespace detail

}  // namespace projmod
