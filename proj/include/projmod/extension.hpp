#pragma once

#include <deque>

#include "projmod/connection.hpp"

namespace projmod {

/// Group elements act on A through automorphisms, entrywise on M_n(A)
/// (written g * x) and on A^n (written g # v). Invertible by construction.
using GroupElement = Automorphism;

/// g * x.
MatrixElement group_act(const GroupElement& g, const MatrixElement& x);
/// g # v.
std::vector<AlgebraElement> group_act(const GroupElement& g,
                                      std::span<const AlgebraElement> v);

/// gamma(g) = p (g*p) + (1-p)(1 - g*p), invertible with
/// gamma(g) (g*p) gamma(g)^{-1} = p. Throws NotInNeighborhood when g*p
/// leaves the similarity neighborhood U_p.
struct GroupLift {
  MatrixElement gamma;
  MatrixElement gamma_inv;
  double conjugation_residual;  // || gamma (g*p) gamma^{-1} - p ||
};
GroupLift gamma_group(const GroupElement& g, const Idempotent& p);

/// The semilinear lift S_E(g): s -> gamma(g) (g # s), together with its
/// measured semilinearity defect S_E(g)(s.a) - S_E(g)(s).(g.a).
struct LiftedElement {
  MatrixElement gamma;
  GroupElement g;
  double semilinearity_residual;
};

LiftedElement make_lift(const ModulePtr& E, const GroupElement& g, Rng& rng,
                        int samples = 4);
ModuleVector lift_apply(const ModulePtr& E, const LiftedElement& lift,
                        const ModuleVector& s);
ModuleVector lift_apply(const ModulePtr& E, const GroupElement& g,
                        const ModuleVector& s);

/// Case-2 route: when g*p is not in the similarity neighborhood of p, a
/// caller-supplied iso pair (x, y) with xy = g*p, yx = p (loose) is
/// normalized and stabilized; the doubled conjugator lifts g on the
/// stabilized module. Returns the lift living on stabilize_module(E).
LiftedElement stabilized_lift(const ModulePtr& E, const GroupElement& g,
                              const MatrixElement& x, const MatrixElement& y,
                              Rng& rng);

/// omega(g, g') = gamma(g) (g * gamma(g')) gamma(gg')^{-1}, as a corner
/// element of End_A(E); normalized so omega(g, 1) = omega(1, g) = p exactly.
MatrixElement cocycle_omega(const ModulePtr& E, const GroupElement& g,
                            const GroupElement& gp);

/// S(g)(phi) = gamma(g) (g * phi) gamma(g)^{-1} on corner elements.
MatrixElement lift_conjugate(const ModulePtr& E, const GroupElement& g,
                             const MatrixElement& phi);

/// An element n sigma(g) of the extension, n a corner element of GL_A(E).
struct ExtensionPair {
  MatrixElement n;
  GroupElement g;
};

/// n sigma(g) n' sigma(g') = (n S(g)(n') omega(g, g')) sigma(gg').
ExtensionPair extension_multiply(const ModulePtr& E, const ExtensionPair& a,
                                 const ExtensionPair& b);

/// Structural equality of group elements (equal shifts, equal inner units).
bool same_group_element(const GroupElement& a, const GroupElement& b);

/// Memo for the group lifts gamma(g) and cocycle values of one module;
/// sweeps over many cocycle evaluations reuse the inversions.
/// Not thread-safe.
class LiftCache {
 public:
  explicit LiftCache(ModulePtr E) : E_(std::move(E)) {}
  const ModulePtr& module() const { return E_; }
  const GroupLift& lift(const GroupElement& g);
  const MatrixElement& omega(const GroupElement& g, const GroupElement& gp);

 private:
  ModulePtr E_;
  std::deque<std::pair<GroupElement, GroupLift>> entries_;  // stable refs
  std::deque<std::tuple<GroupElement, GroupElement, MatrixElement>> omegas_;
};

MatrixElement cocycle_omega(LiftCache& cache, const GroupElement& g,
                            const GroupElement& gp);
MatrixElement lift_conjugate(LiftCache& cache, const GroupElement& g,
                             const MatrixElement& phi);
ExtensionPair extension_multiply(LiftCache& cache, const ExtensionPair& a,
                                 const ExtensionPair& b);
LiftedElement make_lift(LiftCache& cache, const GroupElement& g, Rng& rng,
                        int samples = 4);

/// The multiplier m(a) = a psi(a)^{-1} realizing the crossed homomorphism
/// C(psi)(a) = rho_E(m(a)) through the right action. Satisfies
/// m(ab) = a m(b) a^{-1} m(a). Throws NotInvertible.
AlgebraElement crossed_hom(const Automorphism& psi, const AlgebraElement& a);

/// T_1(S_E)(x): s -> gamma_dot(x) s + x.s with
/// gamma_dot(x) = (2p-1)(x.p); a derivative endomorphism over x.
DerivativeEndomorphism t1se(const ModulePtr& E, const Derivation& x);

/// DS(x)(phi) = [gamma_dot(x), phi] + x.phi as a corner element; equals
/// the operator commutator [t1se(x), phi] on E (verified on generators).
MatrixElement ds_apply(const ModulePtr& E, const Derivation& x,
                       const MatrixElement& phi);

/// The corner element of [t1se(x), t1se(x')] - t1se([x, x']), materialized
/// column by column from the generator images; A-linear on E.
MatrixElement domega(const ModulePtr& E, const Derivation& x,
                     const Derivation& y);

/// An element (phi, x) of gl_A(E) x g presenting the extension Lie algebra
/// on the product set: the operator is phi + t1se(x).
struct ExtensionElement {
  MatrixElement phi;
  Derivation x;
};

/// [(phi,x), (phi',x')] = ([phi,phi'] + DS(x)(phi') - DS(x')(phi)
///                         + Domega(x,x'), [x,x']).
ExtensionElement hat_bracket(const ModulePtr& E, const ExtensionElement& u,
                             const ExtensionElement& v);

/// The operator phi + t1se(x) of an extension element.
DerivativeEndomorphism extension_operator(const ModulePtr& E,
                                          const ExtensionElement& u);

/// Precomputed bracket data over a fixed module and derivation basis:
/// gamma_dot of the basis elements and the quadratic cocycle on basis
/// pairs. Brackets of elements whose derivation parts lie in the basis
/// span are then assembled by (bi)linearity, which avoids re-materializing
/// Domega per call. Requires basis-span derivation parts.
class BracketContext {
 public:
  BracketContext(ModulePtr E, BasisPtr basis);
  const ModulePtr& module() const { return E_; }
  const BasisPtr& basis() const { return basis_; }
  ExtensionElement bracket(const ExtensionElement& u,
                           const ExtensionElement& v) const;

 private:
  ModulePtr E_;
  BasisPtr basis_;
  std::vector<MatrixElement> gamma_dot_;
  std::vector<std::vector<MatrixElement>> domega_;  // upper triangle
};

}  // namespace projmod
