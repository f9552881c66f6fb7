#include "projmod/actions.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace projmod {

namespace {

bool torus_kind(const BackendPtr& b) {
  return b->kind != BackendKind::Matrix;
}

// phase multiplier per coefficient: a |-> sum_k f(k) c_k e_k
template <typename F>
AlgebraElement map_modes(const AlgebraElement& a, F&& f) {
  const int dim = a.backend()->dim;
  std::vector<std::pair<std::vector<int>, Complex>> items = a.coeff_items();
  for (auto& [k, c] : items) c *= f(std::span<const int>(k.data(), dim));
  return AlgebraElement::from_coeffs(a.backend(), items);
}

}  // namespace

Derivation Derivation::zero(BackendPtr backend) {
  Derivation d;
  if (torus_kind(backend)) d.weights_ = Eigen::VectorXd::Zero(backend->dim);
  d.backend_ = std::move(backend);
  return d;
}

Derivation Derivation::basis(BackendPtr backend, int j) {
  if (!torus_kind(backend))
    throw UnknownDerivation("matrix backends have no basis derivations");
  if (j < 0 || j >= backend->dim)
    throw BadDimension("basis derivation index out of range");
  Derivation d = zero(std::move(backend));
  d.weights_[j] = 1.0;
  return d;
}

Derivation Derivation::inner(AlgebraElement u) {
  Derivation d = zero(u.backend());
  d.inner_ = std::move(u);
  return d;
}

Derivation Derivation::translation_generator(BackendPtr backend,
                                             Eigen::VectorXd v) {
  if (!torus_kind(backend))
    throw UnknownDerivation("matrix backends have no translations");
  if (v.size() != backend->dim)
    throw BadDimension("translation vector has wrong dimension");
  Derivation d = zero(std::move(backend));
  d.weights_ = std::move(v);
  return d;
}

bool Derivation::is_zero() const {
  if (weights_.size() > 0 && weights_.cwiseAbs().maxCoeff() != 0.0)
    return false;
  return !inner_ || norm(*inner_) == 0.0;
}

Derivation operator+(const Derivation& a, const Derivation& b) {
  require_same_backend(a.backend_, b.backend_);
  Derivation d = Derivation::zero(a.backend_);
  if (d.weights_.size() > 0) d.weights_ = a.weights_ + b.weights_;
  if (a.inner_ && b.inner_)
    d.inner_ = *a.inner_ + *b.inner_;
  else if (a.inner_)
    d.inner_ = a.inner_;
  else if (b.inner_)
    d.inner_ = b.inner_;
  return d;
}

Derivation operator*(double w, const Derivation& a) {
  Derivation d = a;
  if (d.weights_.size() > 0) d.weights_ *= w;
  if (d.inner_) d.inner_ = Complex(w, 0.0) * (*d.inner_);
  return d;
}

Derivation operator-(const Derivation& a) { return -1.0 * a; }

AlgebraElement apply(const Derivation& d, const AlgebraElement& a) {
  require_same_backend(d.backend(), a.backend());
  AlgebraElement out = AlgebraElement::zero(a.backend());
  const auto& w = d.weights();
  if (w.size() > 0 && w.cwiseAbs().maxCoeff() != 0.0) {
    const double two_pi = 2.0 * std::numbers::pi;
    out = out + map_modes(a, [&](std::span<const int> k) {
            double s = 0.0;
            for (int j = 0; j < static_cast<int>(k.size()); ++j)
              s += w[j] * k[j];
            return Complex(0.0, two_pi * s);
          });
  }
  if (d.inner_part()) {
    const AlgebraElement& u = *d.inner_part();
    out = out + (u * a - a * u);
  }
  return out;
}

Derivation bracket(const Derivation& a, const Derivation& b) {
  require_same_backend(a.backend(), b.backend());
  // [sum w delta + ad u, sum w' delta + ad u']
  //   = ad( (sum w delta)(u') - (sum w' delta)(u) + [u, u'] ),
  // since the basis derivations commute among themselves.
  AlgebraElement inner = AlgebraElement::zero(a.backend());
  bool nonzero = false;
  const bool a_has_w =
      a.weights().size() > 0 && a.weights().cwiseAbs().maxCoeff() != 0.0;
  const bool b_has_w =
      b.weights().size() > 0 && b.weights().cwiseAbs().maxCoeff() != 0.0;
  if (a_has_w && b.inner_part()) {
    Derivation wa = Derivation::translation_generator(a.backend(), a.weights());
    inner = inner + apply(wa, *b.inner_part());
    nonzero = true;
  }
  if (b_has_w && a.inner_part()) {
    Derivation wb = Derivation::translation_generator(b.backend(), b.weights());
    inner = inner - apply(wb, *a.inner_part());
    nonzero = true;
  }
  if (a.inner_part() && b.inner_part()) {
    const AlgebraElement& u = *a.inner_part();
    const AlgebraElement& v = *b.inner_part();
    inner = inner + (u * v - v * u);
    nonzero = true;
  }
  if (!nonzero) return Derivation::zero(a.backend());
  return Derivation::inner(inner);
}

Automorphism Automorphism::identity(BackendPtr backend) {
  Automorphism psi;
  if (torus_kind(backend)) psi.shift_ = Eigen::VectorXd::Zero(backend->dim);
  psi.backend_ = std::move(backend);
  return psi;
}

Automorphism Automorphism::translation(BackendPtr backend, Eigen::VectorXd v) {
  if (!torus_kind(backend))
    throw Error("matrix backends have no translations");
  if (v.size() != backend->dim)
    throw BadDimension("translation vector has wrong dimension");
  Automorphism psi = identity(std::move(backend));
  psi.shift_ = std::move(v);
  return psi;
}

Automorphism Automorphism::inner(const AlgebraElement& u) {
  Automorphism psi = identity(u.backend());
  if (u.backend()->kind == BackendKind::Torus) {
    // commutative backend: conjugation is trivial, but u must be a unit
    (void)inverse(u);
    return psi;
  }
  psi.inner_ = InnerPart{u, inverse(u)};
  return psi;
}

bool Automorphism::is_identity() const {
  for (Eigen::Index j = 0; j < shift_.size(); ++j) {
    const double frac = shift_[j] - std::round(shift_[j]);
    if (std::abs(frac) > 1e-12) return false;
  }
  return !inner_;
}

AlgebraElement apply(const Automorphism& psi, const AlgebraElement& a) {
  require_same_backend(psi.backend(), a.backend());
  AlgebraElement out = a;
  const auto& v = psi.shift();
  if (v.size() > 0 && v.cwiseAbs().maxCoeff() != 0.0) {
    const double two_pi = 2.0 * std::numbers::pi;
    out = map_modes(out, [&](std::span<const int> k) {
      double s = 0.0;
      for (int j = 0; j < static_cast<int>(k.size()); ++j) s += v[j] * k[j];
      return std::polar(1.0, two_pi * s);
    });
  }
  if (psi.has_inner()) out = psi.inner_u() * out * psi.inner_u_inv();
  return out;
}

Automorphism compose(const Automorphism& a, const Automorphism& b) {
  require_same_backend(a.backend_, b.backend_);
  // (c_u tau_v) o (c_w tau_x) = c_{u tau_v(w)} tau_{v+x}
  Automorphism out = Automorphism::identity(a.backend_);
  if (out.shift_.size() > 0) out.shift_ = a.shift_ + b.shift_;
  if (a.inner_ || b.inner_) {
    AlgebraElement u = AlgebraElement::unit(a.backend_);
    AlgebraElement u_inv = u;
    if (a.inner_) {
      u = a.inner_->u;
      u_inv = a.inner_->u_inv;
    }
    if (b.inner_) {
      AlgebraElement w = b.inner_->u;
      AlgebraElement w_inv = b.inner_->u_inv;
      if (a.shift_.size() > 0 && a.shift_.cwiseAbs().maxCoeff() != 0.0) {
        const Automorphism tv = Automorphism::translation(a.backend_, a.shift_);
        w = apply(tv, w);
        w_inv = apply(tv, w_inv);
      }
      u = u * w;
      u_inv = w_inv * u_inv;
    }
    out.inner_ = Automorphism::InnerPart{std::move(u), std::move(u_inv)};
  }
  return out;
}

Automorphism inverse(const Automorphism& a) {
  // (c_u tau_v)^{-1} = c_{tau_{-v}(u^{-1})} tau_{-v}
  Automorphism out = Automorphism::identity(a.backend_);
  if (out.shift_.size() > 0) out.shift_ = -a.shift_;
  if (a.inner_) {
    AlgebraElement w = a.inner_->u_inv;
    AlgebraElement w_inv = a.inner_->u;
    if (a.shift_.size() > 0 && a.shift_.cwiseAbs().maxCoeff() != 0.0) {
      const Automorphism tv = Automorphism::translation(a.backend_, -a.shift_);
      w = apply(tv, w);
      w_inv = apply(tv, w_inv);
    }
    out.inner_ = Automorphism::InnerPart{std::move(w), std::move(w_inv)};
  }
  return out;
}

}  // namespace projmod
