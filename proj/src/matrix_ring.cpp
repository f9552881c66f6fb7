#include "projmod/matrix_ring.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace projmod {

MatrixElement::MatrixElement(int n, BackendPtr backend) : n_(n) {
  if (n < 1) throw BadDimension("matrix size must be positive");
  entries_.assign(static_cast<std::size_t>(n) * n,
                  AlgebraElement::zero(backend));
  backend_ = std::move(backend);
}

MatrixElement MatrixElement::zero(int n, BackendPtr backend) {
  return MatrixElement(n, std::move(backend));
}

MatrixElement MatrixElement::identity(int n, BackendPtr backend) {
  MatrixElement x(n, backend);
  for (int i = 0; i < n; ++i) x.set(i, i, AlgebraElement::unit(backend));
  return x;
}

void MatrixElement::set(int i, int j, AlgebraElement v) {
  require_same_backend(backend_, v.backend());
  entries_[static_cast<std::size_t>(i) * n_ + j] = std::move(v);
}

int MatrixElement::max_degree() const {
  int d = 0;
  for (const auto& e : entries_) d = std::max(d, e.degree());
  return d;
}

MatrixElement operator+(const MatrixElement& x, const MatrixElement& y) {
  require_same_backend(x.backend_, y.backend_);
  if (x.n_ != y.n_) throw BadDimension("matrix sizes differ");
  MatrixElement out(x.n_, x.backend_);
  for (std::size_t i = 0; i < x.entries_.size(); ++i)
    out.entries_[i] = x.entries_[i] + y.entries_[i];
  return out;
}

MatrixElement operator-(const MatrixElement& x, const MatrixElement& y) {
  return x + (-y);
}

MatrixElement operator-(const MatrixElement& x) {
  return Complex(-1.0, 0.0) * x;
}

MatrixElement operator*(Complex c, const MatrixElement& x) {
  MatrixElement out(x.n_, x.backend_);
  for (std::size_t i = 0; i < x.entries_.size(); ++i)
    out.entries_[i] = c * x.entries_[i];
  return out;
}

MatrixElement operator*(const MatrixElement& x, Complex c) { return c * x; }

MatrixElement operator*(const AlgebraElement& a, const MatrixElement& x) {
  MatrixElement out(x.n_, x.backend_);
  for (std::size_t i = 0; i < x.entries_.size(); ++i)
    out.entries_[i] = a * x.entries_[i];
  return out;
}

namespace {

// shared kernel: the band cap is enforced by the scalar product passed in
template <typename Mul>
MatrixElement mat_product(const MatrixElement& x, const MatrixElement& y,
                          const Mul& mul) {
  require_same_backend(x.backend(), y.backend());
  if (x.n() != y.n()) throw BadDimension("matrix sizes differ");
  const int n = x.n();
  MatrixElement out(n, x.backend());
  const bool heavy = x.backend()->kind != BackendKind::Matrix &&
                     (x.max_degree() + y.max_degree()) > 24 && n > 1;
  std::exception_ptr err = nullptr;
#pragma omp parallel for collapse(2) schedule(dynamic) if (heavy)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      try {
        AlgebraElement s = AlgebraElement::zero(x.backend());
        for (int k = 0; k < n; ++k) s = s + mul(x.at(i, k), y.at(k, j));
        out.set(i, j, std::move(s));
      } catch (...) {
#pragma omp critical(mat_product_err)
        if (!err) err = std::current_exception();
      }
    }
  if (err) std::rethrow_exception(err);
  return out;
}

}  // namespace

MatrixElement operator*(const MatrixElement& x, const MatrixElement& y) {
  return mat_product(
      x, y, [](const AlgebraElement& a, const AlgebraElement& b) {
        return a * b;
      });
}

namespace detail {

MatrixElement mat_mul_unchecked(const MatrixElement& x,
                                const MatrixElement& y) {
  return mat_product(x, y, &mul_unchecked);
}

}  // namespace detail

double norm(const MatrixElement& x) {
  double m = 0.0;
  for (int i = 0; i < x.n(); ++i) {
    double row = 0.0;
    for (int j = 0; j < x.n(); ++j) row += norm(x.at(i, j));
    m = std::max(m, row);
  }
  return m;
}

MatrixElement adjoint(const MatrixElement& x) {
  MatrixElement out(x.n(), x.backend());
  for (int i = 0; i < x.n(); ++i)
    for (int j = 0; j < x.n(); ++j) out.set(i, j, adjoint(x.at(j, i)));
  return out;
}

MatrixElement apply(const Derivation& d, const MatrixElement& x) {
  MatrixElement out(x.n(), x.backend());
  for (int i = 0; i < x.n(); ++i)
    for (int j = 0; j < x.n(); ++j) out.set(i, j, apply(d, x.at(i, j)));
  return out;
}

MatrixElement apply(const Automorphism& psi, const MatrixElement& x) {
  MatrixElement out(x.n(), x.backend());
  for (int i = 0; i < x.n(); ++i)
    for (int j = 0; j < x.n(); ++j) out.set(i, j, apply(psi, x.at(i, j)));
  return out;
}

MatrixElement embed_tilde(const MatrixElement& x, int N) {
  if (N < x.n()) throw BadDimension("embed_tilde target smaller than source");
  MatrixElement out(N, x.backend());
  for (int i = 0; i < x.n(); ++i)
    for (int j = 0; j < x.n(); ++j) out.set(i, j, x.at(i, j));
  return out;
}

MatrixElement top_left(const MatrixElement& x, int m) {
  if (m > x.n()) throw BadDimension("top_left block larger than matrix");
  MatrixElement out(m, x.backend());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out.set(i, j, x.at(i, j));
  return out;
}

MatrixElement block2(const MatrixElement& a, const MatrixElement& b,
                     const MatrixElement& c, const MatrixElement& d) {
  const int n = a.n();
  if (b.n() != n || c.n() != n || d.n() != n)
    throw BadDimension("block2 requires equal block sizes");
  MatrixElement out(2 * n, a.backend());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      out.set(i, j, a.at(i, j));
      out.set(i, n + j, b.at(i, j));
      out.set(n + i, j, c.at(i, j));
      out.set(n + i, n + j, d.at(i, j));
    }
  return out;
}

namespace {

double inverse_residual(const MatrixElement& x, const MatrixElement& y) {
  const MatrixElement id = MatrixElement::identity(x.n(), x.backend());
  return std::max(norm(detail::mat_mul_unchecked(x, y) - id),
                  norm(detail::mat_mul_unchecked(y, x) - id));
}

MatrixElement invert_torus_grid_once(const MatrixElement& x, int band_in,
                                     double* residual_out) {
  const auto& cfg = *x.backend();
  const int n = x.n();
  const int band_out = std::min(2 * band_in, cfg.max_degree);
  const int grid = fft_friendly_size(std::max(
      4 * cfg.degree + 1, 2 * std::max(x.max_degree(), band_out) + 1));

  std::int64_t total = 1;
  for (int j = 0; j < cfg.dim; ++j) total *= grid;

  std::vector<Eigen::VectorXcd> vals(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      vals[static_cast<std::size_t>(i) * n + j] =
          grid_values(x.at(i, j), grid);

  std::vector<Eigen::VectorXcd> inv_vals(
      static_cast<std::size_t>(n) * n, Eigen::VectorXcd(total));
  double min_sv = std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(min : min_sv)
  for (std::int64_t t = 0; t < total; ++t) {
    if (n == 1) {
      const Complex v = vals[0][t];
      min_sv = std::min(min_sv, std::abs(v));
      inv_vals[0][t] = 1.0 / v;
    } else if (n == 2) {
      // closed-form inverse and smallest singular value
      const Complex a = vals[0][t], b = vals[1][t], c = vals[2][t],
                    d = vals[3][t];
      const Complex det = a * d - b * c;
      const double fro2 =
          std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
      const double disc =
          std::sqrt(std::max(0.0, fro2 * fro2 - 4.0 * std::norm(det)));
      min_sv = std::min(min_sv, std::sqrt(std::max(0.0, 0.5 * (fro2 - disc))));
      inv_vals[0][t] = d / det;
      inv_vals[1][t] = -b / det;
      inv_vals[2][t] = -c / det;
      inv_vals[3][t] = a / det;
    } else {
      Eigen::MatrixXcd point(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          point(i, j) = vals[static_cast<std::size_t>(i) * n + j][t];
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
          point, Eigen::ComputeFullU | Eigen::ComputeFullV);
      min_sv = std::min(min_sv, svd.singularValues().minCoeff());
      const Eigen::MatrixXcd pointinv =
          svd.matrixV() * svd.singularValues().cwiseInverse().asDiagonal() *
          svd.matrixU().adjoint();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          inv_vals[static_cast<std::size_t>(i) * n + j][t] = pointinv(i, j);
    }
  }
  if (min_sv < cfg.tol)
    throw NotInvertible("grid minimum singular value " +
                        std::to_string(min_sv) + " below tolerance");

  MatrixElement out(n, x.backend());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.set(i, j,
              from_grid_values(x.backend(),
                               inv_vals[static_cast<std::size_t>(i) * n + j],
                               grid, band_out));
  *residual_out = inverse_residual(x, out);
  return out;
}

MatrixElement invert_torus_grid(const MatrixElement& x) {
  // escalate the retained band until the residual is comfortable
  const auto& cfg = *x.backend();
  MatrixElement best;
  double best_r = std::numeric_limits<double>::infinity();
  int band_in = std::max(cfg.degree, x.max_degree());
  for (int attempt = 0; attempt < 3; ++attempt) {
    double r = 0.0;
    MatrixElement y = invert_torus_grid_once(x, band_in, &r);
    if (r < best_r) {
      best = std::move(y);
      best_r = r;
    }
    if (best_r <= 0.05 * cfg.tol ||
        std::min(2 * band_in, cfg.max_degree) == cfg.max_degree)
      break;
    band_in *= 2;
  }
  if (best_r > cfg.tol)
    throw NotInvertible("inverse residual " + std::to_string(best_r) +
                        " above tolerance");
  return best;
}

MatrixElement invert_newton_schulz(const MatrixElement& x) {
  const auto& cfg = *x.backend();
  const MatrixElement id = MatrixElement::identity(x.n(), x.backend());
  const MatrixElement xstar = adjoint(x);
  const double c = norm(x) * norm(xstar);
  if (c == 0.0) throw NotInvertible("zero matrix");
  MatrixElement y = Complex(1.0 / c, 0.0) * xstar;
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const MatrixElement r = id - x * y;
    const double rn = norm(r);
    if (rn <= 1e-13) break;
    if (rn >= prev && it > 4) {
      if (rn <= cfg.tol) break;  // converged to the rounding floor
      throw NotInvertible("Newton-Schulz residual stalled at " +
                          std::to_string(rn));
    }
    prev = rn;
    y = y + y * r;
  }
  const double r = inverse_residual(x, y);
  if (r > cfg.tol)
    throw NotInvertible("inverse residual " + std::to_string(r) +
                        " above tolerance");
  return y;
}

MatrixElement invert_dense(const MatrixElement& x) {
  // M_n(M_d(C)) = M_{nd}(C): flatten, solve exactly, unflatten
  const auto& cfg = *x.backend();
  const int n = x.n();
  const int d = cfg.dim;
  Eigen::MatrixXcd flat(n * d, n * d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      flat.block(i * d, j * d, d, d) = x.at(i, j).matrix();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(flat);
  Eigen::MatrixXcd inv = lu.inverse();
  if (!inv.allFinite()) throw NotInvertible("singular matrix");
  MatrixElement out(n, x.backend());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.set(i, j, AlgebraElement::from_matrix(
                        x.backend(), inv.block(i * d, j * d, d, d)));
  const double r = inverse_residual(x, out);
  if (r > cfg.tol)
    throw NotInvertible("inverse residual " + std::to_string(r) +
                        " above tolerance");
  return out;
}

}  // namespace

MatrixElement inverse(const MatrixElement& x) {
  switch (x.backend()->kind) {
    case BackendKind::Torus: return invert_torus_grid(x);
    case BackendKind::NCTorus: return invert_newton_schulz(x);
    case BackendKind::Matrix: return invert_dense(x);
  }
  throw Error("unreachable");
}

}  // namespace projmod
