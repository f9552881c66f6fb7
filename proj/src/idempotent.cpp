#include "projmod/idempotent.hpp"

#include <cmath>
#include <limits>

namespace projmod {

namespace {

double idem_residual(const MatrixElement& p) {
  return norm(detail::mat_mul_unchecked(p, p) - p);
}

}  // namespace

IdempotentCheck is_idempotent(const MatrixElement& p) {
  const double r = idem_residual(p);
  return {r <= p.backend()->tol, r};
}

Idempotent::Idempotent(MatrixElement p) : p_(std::move(p)) {
  residual_ = idem_residual(p_);
  if (residual_ > p_.backend()->tol)
    throw Error("not an idempotent within tolerance (residual " +
                std::to_string(residual_) + ")");
}

MatrixElement Idempotent::complement() const {
  return MatrixElement::identity(p_.n(), p_.backend()) - p_;
}

Idempotent retract_idempotent(const MatrixElement& p0, double target) {
  double r = idem_residual(p0);
  if (r >= 0.25)
    throw NoConvergence("seed residual " + std::to_string(r) +
                        " outside the retraction basin");
  MatrixElement p = p0;
  for (int it = 0; it < 50 && r > target; ++it) {
    const MatrixElement p2 = p * p;
    MatrixElement next =
        Complex(3.0, 0.0) * p2 - Complex(2.0, 0.0) * (p2 * p);
    const double rn = idem_residual(next);
    if (rn >= r) break;  // rounding floor reached
    p = std::move(next);
    r = rn;
  }
  if (r > 1e-12)
    throw NoConvergence("retraction residual stalled at " +
                        std::to_string(r));
  return Idempotent(p);
}

SimilarityWitness similarity_witness(const Idempotent& p,
                                     const Idempotent& q) {
  require_same_backend(p.backend(), q.backend());
  if (p.n() != q.n()) throw BadDimension("idempotent sizes differ");
  const MatrixElement s =
      p.matrix() * q.matrix() + p.complement() * q.complement();
  MatrixElement s_inv;
  try {
    s_inv = inverse(s);
  } catch (const NotInvertible& e) {
    throw NotInNeighborhood(std::string("witness not invertible: ") +
                            e.what());
  }
  if (norm(s) * norm(s_inv) > 1e8)
    throw NotInNeighborhood("witness numerically near-singular");
  const double r = norm(detail::mat_mul_unchecked(
                            detail::mat_mul_unchecked(s, q.matrix()), s_inv) -
                        p.matrix());
  if (r > p.backend()->tol * 10.0)
    throw NotInNeighborhood("conjugation residual " + std::to_string(r));
  return {s, s_inv, q, p, r};
}

MatrixElement path_conjugator(std::span<const Idempotent> path) {
  if (path.empty()) throw BadDimension("empty idempotent path");
  const auto& backend = path[0].backend();
  MatrixElement g = MatrixElement::identity(path[0].n(), backend);
  MatrixElement g_inv = g;
  for (std::size_t i = 1; i < path.size(); ++i) {
    SimilarityWitness w = [&] {
      try {
        return similarity_witness(path[i], path[i - 1]);
      } catch (const NotInNeighborhood& e) {
        throw NotInNeighborhood("step " + std::to_string(i) + ": " + e.what());
      }
    }();
    // w conjugates path[i-1] into path[i]; compose left
    g = w.s * g;
    g_inv = g_inv * w.s_inv;
  }
  const double budget =
      backend->tol * static_cast<double>(std::max<std::size_t>(path.size(), 2));
  const double r = norm(detail::mat_mul_unchecked(
                            detail::mat_mul_unchecked(g, path[0].matrix()),
                            g_inv) -
                        path[path.size() - 1].matrix());
  if (r > budget)
    throw NotInNeighborhood("path conjugation residual " + std::to_string(r) +
                            " above budget " + std::to_string(budget));
  return g;
}

MatrixElement corner_project(const MatrixElement& x, const Idempotent& p) {
  return p.matrix() * x * p.matrix();
}

MatrixElement corner_invert(const MatrixElement& a, const Idempotent& p) {
  if (norm(corner_project(a, p) - a) > std::max(1.0, norm(a)) * 1e-6)
    throw NotInvertibleInCorner("input is not a corner element");
  const MatrixElement padded = a + p.complement();
  MatrixElement padded_inv;
  try {
    padded_inv = inverse(padded);
  } catch (const NotInvertible& e) {
    throw NotInvertibleInCorner(std::string("padded element: ") + e.what());
  }
  const MatrixElement b = padded_inv - p.complement();
  const double r = std::max(norm(detail::mat_mul_unchecked(a, b) - p.matrix()),
                            norm(detail::mat_mul_unchecked(b, a) - p.matrix()));
  if (r > p.backend()->tol * 10.0)
    throw NotInvertibleInCorner("corner inverse residual " +
                                std::to_string(r));
  return b;
}

std::pair<MatrixElement, MatrixElement> normalize_iso_pair(
    const MatrixElement& x, const MatrixElement& y, const Idempotent& p,
    const Idempotent& q) {
  require_same_backend(x.backend(), y.backend());
  if (norm(detail::mat_mul_unchecked(x, y) - q.matrix()) > 1e-6 ||
      norm(detail::mat_mul_unchecked(y, x) - p.matrix()) > 1e-6)
    throw NotAnIsoPair("products too far from the target idempotents");

  MatrixElement xp = q.matrix() * x * p.matrix();
  MatrixElement yp = p.matrix() * y * q.matrix();

  // polish: make y' the exact corner inverse of x' on the p side; the
  // q-side product is then an idempotent in qM q close to q, hence q
  const MatrixElement w = yp * xp;  // in pMp, close to p
  MatrixElement v = p.matrix();
  for (int it = 0; it < 40; ++it) {
    const MatrixElement r = p.matrix() - w * v;
    if (norm(r) <= 1e-14) break;
    v = v + v * r;
  }
  yp = v * yp;

  const double tol = p.backend()->tol;
  if (norm(detail::mat_mul_unchecked(xp, yp) - q.matrix()) > tol ||
      norm(detail::mat_mul_unchecked(yp, xp) - p.matrix()) > tol)
    throw NotAnIsoPair("normalized products fail the tolerance");
  return {std::move(xp), std::move(yp)};
}

StabilizedConjugator stabilize_conjugator(const MatrixElement& x,
                                          const MatrixElement& y,
                                          const Idempotent& p,
                                          const Idempotent& q) {
  const double tol = p.backend()->tol;
  if (norm(detail::mat_mul_unchecked(x, y) - q.matrix()) > tol ||
      norm(detail::mat_mul_unchecked(y, x) - p.matrix()) > tol)
    throw NotAnIsoPair("inputs are not a normalized iso pair");

  const int n = p.n();
  const MatrixElement id = MatrixElement::identity(n, p.backend());
  const MatrixElement alpha = block2(id - q.matrix(), x, y, id - p.matrix());
  const MatrixElement beta =
      block2(id - p.matrix(), p.matrix(), p.matrix(), id - p.matrix());
  const MatrixElement z = beta * alpha;
  const MatrixElement z_inv = alpha * beta;  // both factors are involutions

  const MatrixElement id2 = MatrixElement::identity(2 * n, p.backend());
  const MatrixElement ptilde = embed_tilde(p.matrix(), 2 * n);
  const MatrixElement qtilde = embed_tilde(q.matrix(), 2 * n);

  StabilizedConjugator out{
      alpha,
      beta,
      z,
      norm(detail::mat_mul_unchecked(alpha, alpha) - id2),
      norm(detail::mat_mul_unchecked(beta, beta) - id2),
      norm(detail::mat_mul_unchecked(detail::mat_mul_unchecked(z, qtilde),
                                     z_inv) -
           ptilde)};
  return out;
}

}  // namespace projmod
