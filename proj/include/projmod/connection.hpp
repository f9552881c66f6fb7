#pragma once

#include <functional>

#include "projmod/module.hpp"
#include "projmod/random.hpp"

namespace projmod {

/// A declared, finite basis of derivations. Connections and the extension
/// cocycles evaluate their 1-forms on this basis only.
struct DerivationBasis {
  std::vector<Derivation> elements;
  BackendPtr backend;
};

using BasisPtr = std::shared_ptr<const DerivationBasis>;

BasisPtr make_basis(std::vector<Derivation> elements);
/// {delta_1, ..., delta_d} for torus kinds.
BasisPtr standard_torus_basis(const BackendPtr& backend);

/// Coordinates of D over the basis. Supports the torus basis (weights are
/// read off) and structural matches of single basis elements; otherwise
/// throws UnknownDerivation.
Eigen::VectorXd basis_coordinates(const BasisPtr& basis, const Derivation& d);

/// gamma(D) = (2p - 1) (D.p); satisfies [p, gamma(D)] = D.p and the
/// corner annihilation identities p (D.p) p = 0 = (1-p)(D.p)(1-p).
MatrixElement gamma_of_derivation(const Derivation& d, const Idempotent& p);

/// A connection nabla_alpha = p d + alpha on E = pA^n, represented by
/// the corner values alpha(D_j) on the declared basis.
class Connection {
 public:
  Connection(ModulePtr module, BasisPtr basis,
             std::vector<MatrixElement> alpha);
  static Connection levi_civita(ModulePtr module, BasisPtr basis);

  const ModulePtr& module() const { return module_; }
  const BasisPtr& basis() const { return basis_; }
  int basis_size() const { return static_cast<int>(alpha_.size()); }
  const MatrixElement& alpha(int j) const { return alpha_[j]; }

 private:
  ModulePtr module_;
  BasisPtr basis_;
  std::vector<MatrixElement> alpha_;
};

/// nabla_D s = p (D.s) + alpha(D) s for D in the span of the basis.
/// Throws UnknownDerivation otherwise.
ModuleVector covariant_derivative(const Connection& c, const Derivation& d,
                                  const ModuleVector& s);
ModuleVector covariant_derivative(const Connection& c, int basis_index,
                                  const ModuleVector& s);

/// Gauge action nabla -> g^{-1} nabla g on the offset form:
/// alpha' = p (g^{-1} D.g) p + g^{-1} alpha g, verified operationally on
/// the module generators. Throws NotInvertibleInCorner.
Connection gauge_transform(const Connection& c, const ModuleHom& g);
/// Same, with a caller-supplied corner inverse of g.
Connection gauge_transform(const Connection& c, const ModuleHom& g,
                           const MatrixElement& g_inv);

/// An operator s -> (matrix) s + D.s paired with its derivation.
struct DerivativeEndomorphism {
  MatrixElement mat;
  Derivation d;
};

/// Raw application; the result need not lie in E for invalid pairs.
std::vector<AlgebraElement> dend_apply(const DerivativeEndomorphism& phi,
                                       const ModuleVector& s);

struct DEndReport {
  double relation_residual = 0.0;    // max || phi(s a) - phi(s) a - s (D.a) ||
  double membership_residual = 0.0;  // max || (1-p) phi(s) ||
  bool pass = false;
};

/// Checks the derivative-endomorphism relation of phi against the module
/// action for each generator algebra element, on the module generators
/// plus sampled vectors.
DEndReport dend_check(const DerivativeEndomorphism& phi, const ModulePtr& E,
                      std::span<const AlgebraElement> generators, Rng& rng,
                      int samples = 4);

/// Corner matrix of an A-linear operator on E, reconstructed column by
/// column from the images of the generators p e_i.
MatrixElement corner_of_operator(
    const ModulePtr& E,
    const std::function<ModuleVector(const ModuleVector&)>& op);

struct CovariantCoordinateReport {
  double max_commutator = 0.0;  // max residual of [rho_hat(a), rho(b)] = 0
  bool pass = false;
};

/// Covariant coordinate rho_hat(a) = rho(a) + nabla_{ad a}; reports the
/// worst commutator norm against right multiplications by the given
/// generator list. The 1-form offset is extended by zero on inner
/// derivations outside the basis span.
CovariantCoordinateReport covariant_coordinate(
    const AlgebraElement& a, const Connection& c,
    std::span<const AlgebraElement> generators, Rng& rng, int samples = 4);

/// rho_hat(a) applied to s.
ModuleVector covariant_coordinate_apply(const AlgebraElement& a,
                                        const Connection& c,
                                        const ModuleVector& s);

struct CurvatureReport {
  MatrixElement value;                 // corner matrix of the curvature
  double a_linearity_residual = 0.0;   // sampled Leibniz-defect residual
};

/// Curvature report [nabla_i, nabla_j] - nabla_{[D_i, D_j]} with an
/// A-linearity check.
CurvatureReport curvature(const Connection& c, int i, int j, Rng& rng,
                          int samples = 4);

}  // namespace projmod
