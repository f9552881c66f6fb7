#pragma once

#include <Eigen/Dense>
#include <optional>

#include "projmod/algebra.hpp"

namespace projmod {

/// A derivation of the backend algebra in normal form
///    D = sum_j w_j delta_j  +  ad(u),        ad(u)(a) = u a - a u,
/// where delta_j are the coefficient-scaling basis derivations of the
/// torus kinds. Matrix backends carry inner derivations only.
class Derivation {
 public:
  static Derivation zero(BackendPtr backend);
  static Derivation basis(BackendPtr backend, int j);
  static Derivation inner(AlgebraElement u);
  /// sum_j v_j delta_j (the generator of the translation flow t -> tv).
  static Derivation translation_generator(BackendPtr backend,
                                          Eigen::VectorXd v);

  const BackendPtr& backend() const { return backend_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const std::optional<AlgebraElement>& inner_part() const { return inner_; }
  bool is_zero() const;

  friend Derivation operator+(const Derivation& a, const Derivation& b);
  friend Derivation operator*(double w, const Derivation& a);
  friend Derivation operator-(const Derivation& a);

 private:
  BackendPtr backend_;
  Eigen::VectorXd weights_;  // size dim for torus kinds, 0 otherwise
  std::optional<AlgebraElement> inner_;
};

AlgebraElement apply(const Derivation& d, const AlgebraElement& a);

/// Lie bracket of derivations; closes on the normal form above:
/// [D, ad u] = ad(D.u), [ad u, ad v] = ad(uv - vu), [delta_i, delta_j] = 0.
Derivation bracket(const Derivation& a, const Derivation& b);

/// An automorphism of the backend algebra in the normal form
///    psi = c_u o tau_v,   tau_v(e_k) = exp(2 pi i k.v) e_k,  c_u(a) = u a u^{-1}.
/// Invertible by construction. On commutative backends the inner part is
/// normalized away.
class Automorphism {
 public:
  static Automorphism identity(BackendPtr backend);
  static Automorphism translation(BackendPtr backend, Eigen::VectorXd v);
  /// Conjugation by u; inverts u up front (throws NotInvertible).
  static Automorphism inner(const AlgebraElement& u);

  const BackendPtr& backend() const { return backend_; }
  const Eigen::VectorXd& shift() const { return shift_; }
  bool has_inner() const { return inner_.has_value(); }
  const AlgebraElement& inner_u() const { return inner_->u; }
  const AlgebraElement& inner_u_inv() const { return inner_->u_inv; }

  /// Structurally the identity map: integral shift, no inner part.
  bool is_identity() const;

 private:
  struct InnerPart {
    AlgebraElement u, u_inv;
  };
  BackendPtr backend_;
  Eigen::VectorXd shift_;
  std::optional<InnerPart> inner_;

  friend Automorphism compose(const Automorphism& a, const Automorphism& b);
  friend Automorphism inverse(const Automorphism& a);
};

AlgebraElement apply(const Automorphism& psi, const AlgebraElement& a);

/// (a o b)(x) = a(b(x)).
Automorphism compose(const Automorphism& a, const Automorphism& b);
Automorphism inverse(const Automorphism& a);

}  // namespace projmod
