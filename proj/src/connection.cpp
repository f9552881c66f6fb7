#include "projmod/connection.hpp"

#include <cmath>

namespace projmod {

namespace {

std::vector<AlgebraElement> random_tuple(const BackendPtr& b, int n, int band,
                                         double mag, Rng& rng) {
  std::vector<AlgebraElement> v;
  for (int i = 0; i < n; ++i) v.push_back(random_element(b, band, mag, rng));
  return v;
}

std::vector<ModuleVector> sample_vectors(const ModulePtr& E, Rng& rng,
                                         int samples) {
  std::vector<ModuleVector> out;
  for (int i = 0; i < E->n(); ++i) out.push_back(generator(E, i));
  const int band = E->backend()->kind == BackendKind::Matrix
                       ? 0
                       : std::min(2, E->backend()->degree);
  for (int t = 0; t < samples; ++t)
    out.push_back(
        project_vector(E, random_tuple(E->backend(), E->n(), band, 1.0, rng)));
  return out;
}

}  // namespace

BasisPtr make_basis(std::vector<Derivation> elements) {
  if (elements.empty()) throw BadDimension("empty derivation basis");
  DerivationBasis b;
  b.backend = elements[0].backend();
  for (const auto& d : elements) require_same_backend(b.backend, d.backend());
  b.elements = std::move(elements);
  return std::make_shared<const DerivationBasis>(std::move(b));
}

BasisPtr standard_torus_basis(const BackendPtr& backend) {
  std::vector<Derivation> ds;
  for (int j = 0; j < backend->dim; ++j)
    ds.push_back(Derivation::basis(backend, j));
  return make_basis(std::move(ds));
}

Eigen::VectorXd basis_coordinates(const BasisPtr& basis, const Derivation& d) {
  const int m = static_cast<int>(basis->elements.size());
  // structural match of a single basis element
  for (int j = 0; j < m; ++j) {
    const Derivation& bj = basis->elements[j];
    const bool winner =
        (d.weights().size() == 0 || bj.weights().size() == 0)
            ? (d.weights().size() == bj.weights().size())
            : ((d.weights() - bj.weights()).cwiseAbs().maxCoeff() <= 1e-14);
    if (!winner) continue;
    if (d.inner_part().has_value() != bj.inner_part().has_value()) continue;
    if (d.inner_part() &&
        norm(*d.inner_part() - *bj.inner_part()) > 1e-12)
      continue;
    Eigen::VectorXd coords = Eigen::VectorXd::Zero(m);
    coords[j] = 1.0;
    return coords;
  }
  if (d.inner_part() && norm(*d.inner_part()) > 0.0)
    throw UnknownDerivation(
        "inner derivation is not a declared basis element");
  if (d.weights().size() == 0)
    throw UnknownDerivation("derivation not expressible over the basis");
  // pure translation part: solve over the basis weight vectors
  const int dim = static_cast<int>(d.weights().size());
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(dim, m);
  for (int j = 0; j < m; ++j) {
    const Derivation& bj = basis->elements[j];
    if (bj.inner_part()) continue;  // cannot mix into a translation
    if (bj.weights().size() == dim) W.col(j) = bj.weights();
  }
  const Eigen::VectorXd coords = W.colPivHouseholderQr().solve(d.weights());
  if ((W * coords - d.weights()).cwiseAbs().maxCoeff() > 1e-12)
    throw UnknownDerivation("derivation not in the span of the basis");
  return coords;
}

MatrixElement gamma_of_derivation(const Derivation& d, const Idempotent& p) {
  const MatrixElement dp = apply(d, p.matrix());
  const MatrixElement two_p_minus_one =
      Complex(2.0, 0.0) * p.matrix() -
      MatrixElement::identity(p.n(), p.backend());
  return two_p_minus_one * dp;
}

Connection::Connection(ModulePtr module, BasisPtr basis,
                       std::vector<MatrixElement> alpha)
    : module_(std::move(module)),
      basis_(std::move(basis)),
      alpha_(std::move(alpha)) {
  require_same_backend(module_->backend(), basis_->backend);
  if (alpha_.size() != basis_->elements.size())
    throw BadDimension("one alpha value per basis derivation required");
  const double tol = module_->backend()->tol * 10.0;
  for (const auto& a : alpha_) {
    if (a.n() != module_->n()) throw BadDimension("alpha value has wrong size");
    if (norm(corner_project(a, module_->idem()) - a) >
        std::max(1.0, norm(a)) * tol)
      throw Error("alpha value violates the corner constraint");
  }
}

Connection Connection::levi_civita(ModulePtr module, BasisPtr basis) {
  std::vector<MatrixElement> alpha(
      basis->elements.size(),
      MatrixElement::zero(module->n(), module->backend()));
  return Connection(std::move(module), std::move(basis), std::move(alpha));
}

namespace {

ModuleVector nabla_with_coords(const Connection& c, const Derivation& d,
                               const Eigen::VectorXd* coords,
                               const ModuleVector& s) {
  const ModulePtr& E = c.module();
  std::vector<AlgebraElement> ds;
  ds.reserve(s.n());
  for (const auto& e : s.entries()) ds.push_back(apply(d, e));
  std::vector<AlgebraElement> out = mat_vec(E->p(), ds);
  if (coords) {
    for (int j = 0; j < c.basis_size(); ++j) {
      if ((*coords)[j] == 0.0) continue;
      const std::vector<AlgebraElement> as =
          mat_vec(c.alpha(j), s.entries());
      for (int i = 0; i < E->n(); ++i)
        out[i] = out[i] + Complex((*coords)[j], 0.0) * as[i];
    }
  }
  return ModuleVector(E, std::move(out));
}

}  // namespace

ModuleVector covariant_derivative(const Connection& c, const Derivation& d,
                                  const ModuleVector& s) {
  const Eigen::VectorXd coords = basis_coordinates(c.basis(), d);
  return nabla_with_coords(c, d, &coords, s);
}

ModuleVector covariant_derivative(const Connection& c, int basis_index,
                                  const ModuleVector& s) {
  if (basis_index < 0 || basis_index >= c.basis_size())
    throw UnknownDerivation("basis index out of range");
  Eigen::VectorXd coords = Eigen::VectorXd::Zero(c.basis_size());
  coords[basis_index] = 1.0;
  return nabla_with_coords(c, c.basis()->elements[basis_index], &coords, s);
}

Connection gauge_transform(const Connection& c, const ModuleHom& g) {
  return gauge_transform(c, g, corner_invert(g.matrix(), c.module()->idem()));
}

Connection gauge_transform(const Connection& c, const ModuleHom& g,
                           const MatrixElement& gi) {
  const ModulePtr& E = c.module();
  const MatrixElement& gm = g.matrix();

  std::vector<MatrixElement> alpha;
  alpha.reserve(c.basis_size());
  for (int j = 0; j < c.basis_size(); ++j) {
    const MatrixElement dg = apply(c.basis()->elements[j], gm);
    // the left logarithmic derivative acts on E through its corner part
    const MatrixElement delta = corner_project(gi * dg, E->idem());
    alpha.push_back(delta + gi * c.alpha(j) * gm);
  }
  Connection out(E, c.basis(), std::move(alpha));

  // spot-check the operational identity nabla'_D s = g^{-1} nabla_D (g s)
  // on the generators of the first basis direction; the scenario suites
  // sweep the full identity
  const double tol = E->backend()->tol * 100.0;
  for (int i = 0; i < E->n(); ++i) {
    const ModuleVector s = generator(E, i);
    const ModuleVector lhs = covariant_derivative(out, 0, s);
    const ModuleVector gs = ModuleVector(E, mat_vec(gm, s.entries()));
    const ModuleVector rhs =
        ModuleVector(E, mat_vec(gi, covariant_derivative(c, 0, gs).entries()));
    if (dist(lhs, rhs) > std::max(1.0, norm(gm) * norm(gi)) * tol)
      throw Error("gauge transform failed the operational identity");
  }
  return out;
}

std::vector<AlgebraElement> dend_apply(const DerivativeEndomorphism& phi,
                                       const ModuleVector& s) {
  std::vector<AlgebraElement> out = mat_vec(phi.mat, s.entries());
  for (int i = 0; i < s.n(); ++i)
    out[i] = out[i] + apply(phi.d, s.at(i));
  return out;
}

DEndReport dend_check(const DerivativeEndomorphism& phi, const ModulePtr& E,
                      std::span<const AlgebraElement> generators, Rng& rng,
                      int samples) {
  DEndReport rep;
  const std::vector<ModuleVector> vecs = sample_vectors(E, rng, samples);
  const MatrixElement comp = E->idem().complement();
  for (const ModuleVector& s : vecs) {
    const std::vector<AlgebraElement> phis = dend_apply(phi, s);
    const std::vector<AlgebraElement> escaped = mat_vec(comp, phis);
    for (const auto& e : escaped)
      rep.membership_residual = std::max(rep.membership_residual, norm(e));
    for (const AlgebraElement& a : generators) {
      const std::vector<AlgebraElement> lhs =
          dend_apply(phi, module_act(s, a));
      const AlgebraElement da = apply(phi.d, a);
      for (int i = 0; i < E->n(); ++i) {
        const AlgebraElement rhs = phis[i] * a + s.at(i) * da;
        rep.relation_residual =
            std::max(rep.relation_residual, norm(lhs[i] - rhs));
      }
    }
  }
  const double tol = E->backend()->tol;
  rep.pass = rep.relation_residual <= tol && rep.membership_residual <= tol;
  return rep;
}

MatrixElement corner_of_operator(
    const ModulePtr& E,
    const std::function<ModuleVector(const ModuleVector&)>& op) {
  MatrixElement x(E->n(), E->backend());
  for (int i = 0; i < E->n(); ++i) {
    const ModuleVector col = op(generator(E, i));
    for (int j = 0; j < E->n(); ++j) x.set(j, i, col.at(j));
  }
  return x * E->p();
}

ModuleVector covariant_coordinate_apply(const AlgebraElement& a,
                                        const Connection& c,
                                        const ModuleVector& s) {
  const Derivation ada = Derivation::inner(a);
  ModuleVector nabla = [&] {
    try {
      return covariant_derivative(c, ada, s);
    } catch (const UnknownDerivation&) {
      // alpha extended by zero on inner derivations outside the basis span
      return nabla_with_coords(c, ada, nullptr, s);
    }
  }();
  return module_act(s, a) + nabla;
}

CovariantCoordinateReport covariant_coordinate(
    const AlgebraElement& a, const Connection& c,
    std::span<const AlgebraElement> generators, Rng& rng, int samples) {
  CovariantCoordinateReport rep;
  const ModulePtr& E = c.module();
  const std::vector<ModuleVector> vecs = sample_vectors(E, rng, samples);
  for (const ModuleVector& s : vecs) {
    const ModuleVector rho_hat_s = covariant_coordinate_apply(a, c, s);
    for (const AlgebraElement& b : generators) {
      // [rho_hat(a), rho(b)] applied to s, via the A-linearity form
      const ModuleVector lhs =
          covariant_coordinate_apply(a, c, module_act(s, b));
      const ModuleVector rhs = module_act(rho_hat_s, b);
      rep.max_commutator = std::max(rep.max_commutator, dist(lhs, rhs));
    }
  }
  rep.pass = rep.max_commutator <= E->backend()->tol;
  return rep;
}

CurvatureReport curvature(const Connection& c, int i, int j, Rng& rng,
                          int samples) {
  const ModulePtr& E = c.module();
  const Derivation& di = c.basis()->elements[i];
  const Derivation& dj = c.basis()->elements[j];
  const Derivation dij = bracket(di, dj);

  const auto op = [&](const ModuleVector& s) {
    ModuleVector out = covariant_derivative(c, i, covariant_derivative(c, j, s)) -
                       covariant_derivative(c, j, covariant_derivative(c, i, s));
    if (!dij.is_zero()) {
      ModuleVector corr = [&] {
        try {
          return covariant_derivative(c, dij, s);
        } catch (const UnknownDerivation&) {
          return nabla_with_coords(c, dij, nullptr, s);
        }
      }();
      out = out - corr;
    }
    return out;
  };

  CurvatureReport rep{corner_of_operator(E, op), 0.0};
  const int band = E->backend()->kind == BackendKind::Matrix
                       ? 0
                       : std::min(2, E->backend()->degree);
  for (int t = 0; t < samples; ++t) {
    const ModuleVector s = project_vector(
        E, random_tuple(E->backend(), E->n(), band, 1.0, rng));
    const AlgebraElement a = random_element(E->backend(), band, 1.0, rng);
    rep.a_linearity_residual =
        std::max(rep.a_linearity_residual,
                 dist(op(module_act(s, a)), module_act(op(s), a)));
  }
  return rep;
}

}  // namespace projmod
