#pragma once

#include <memory>

#include "projmod/idempotent.hpp"

namespace projmod {

/// E = pA^n as a right A-module, presented by its idempotent.
class ProjectiveModule {
 public:
  explicit ProjectiveModule(Idempotent p) : p_(std::move(p)) {}

  int n() const { return p_.n(); }
  const BackendPtr& backend() const { return p_.backend(); }
  const Idempotent& idem() const { return p_; }
  const MatrixElement& p() const { return p_.matrix(); }

 private:
  Idempotent p_;
};

using ModulePtr = std::shared_ptr<const ProjectiveModule>;

ModulePtr make_module(Idempotent p);
/// The free module A^n.
ModulePtr make_free_module(int n, const BackendPtr& backend);
/// Same module presented in M_{2n}(A) by the padded idempotent.
ModulePtr stabilize_module(const ModulePtr& E);

/// An element of E: an n-tuple with p v = v (validated on construction).
class ModuleVector {
 public:
  ModuleVector(ModulePtr module, std::vector<AlgebraElement> v);

  const ModulePtr& module() const { return module_; }
  int n() const { return static_cast<int>(v_.size()); }
  const AlgebraElement& at(int i) const { return v_[i]; }
  const std::vector<AlgebraElement>& entries() const { return v_; }

 private:
  ModulePtr module_;
  std::vector<AlgebraElement> v_;
};

/// Max entry norm; pairs with the max-row-sum matrix norm.
double norm(const ModuleVector& s);
double dist(const ModuleVector& s, const ModuleVector& t);
/// ||p v - v|| of an arbitrary tuple against the module idempotent.
double membership_residual(const ModulePtr& E,
                           std::span<const AlgebraElement> v);

/// X v for an n x n matrix and an n-tuple.
std::vector<AlgebraElement> mat_vec(const MatrixElement& x,
                                    std::span<const AlgebraElement> v);

/// Canonical surjection A^n -> pA^n, v |-> p v.
ModuleVector project_vector(const ModulePtr& E,
                            std::span<const AlgebraElement> v);
/// The module generator p e_i.
ModuleVector generator(const ModulePtr& E, int i);

/// Right action s.a (entrywise right multiplication).
ModuleVector module_act(const ModuleVector& s, const AlgebraElement& a);

ModuleVector operator+(const ModuleVector& s, const ModuleVector& t);
ModuleVector operator-(const ModuleVector& s, const ModuleVector& t);
ModuleVector operator*(Complex c, const ModuleVector& s);

/// An A-linear map pA^n -> qA^n, carried by x with qx = x = xp.
class ModuleHom {
 public:
  ModuleHom(ModulePtr source, ModulePtr target, MatrixElement x);

  const ModulePtr& source() const { return source_; }
  const ModulePtr& target() const { return target_; }
  const MatrixElement& matrix() const { return x_; }

 private:
  ModulePtr source_, target_;
  MatrixElement x_;
};

ModuleVector hom_apply(const ModuleHom& h, const ModuleVector& s);
ModuleHom compose(const ModuleHom& g, const ModuleHom& h);  // g after h
ModuleHom identity_hom(const ModulePtr& E);

/// Inverse in End_A(E) = pM_n(A)p (source = target required).
/// Throws NotInvertibleInCorner; success certifies membership in GL_A(E).
ModuleHom end_algebra_invert(const ModuleHom& h);

/// The twisted module E^psi, presented by p' = M_n(psi^{-1})(p), together
/// with the intertwiner data: psi^(n) carries p'A^n onto pA^n and
/// intertwines the twisted action with the original one.
struct TwistedModule {
  ModulePtr twisted;   ///< p' A^n
  ModulePtr original;  ///< p A^n
  Automorphism psi;
};

TwistedModule twist_module(const ModulePtr& E, const Automorphism& psi);

/// psi^(n) applied entrywise: maps vectors of the twisted module into E.
ModuleVector apply_intertwiner(const TwistedModule& tw, const ModuleVector& s);

}  // namespace projmod
