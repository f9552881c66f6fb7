#include "projmod/module.hpp"

namespace projmod {

ModulePtr make_module(Idempotent p) {
  return std::make_shared<const ProjectiveModule>(std::move(p));
}

ModulePtr make_free_module(int n, const BackendPtr& backend) {
  return make_module(Idempotent(MatrixElement::identity(n, backend)));
}

ModulePtr stabilize_module(const ModulePtr& E) {
  return make_module(Idempotent(embed_tilde(E->p(), 2 * E->n())));
}

double membership_residual(const ModulePtr& E,
                           std::span<const AlgebraElement> v) {
  if (static_cast<int>(v.size()) != E->n())
    throw BadDimension("tuple length != module rank");
  const std::vector<AlgebraElement> pv = mat_vec(E->p(), v);
  double m = 0.0;
  for (int i = 0; i < E->n(); ++i) m = std::max(m, norm(pv[i] - v[i]));
  return m;
}

ModuleVector::ModuleVector(ModulePtr module, std::vector<AlgebraElement> v)
    : module_(std::move(module)), v_(std::move(v)) {
  const double r = membership_residual(module_, v_);
  if (r > module_->backend()->tol * 10.0)
    throw Error("tuple is not in the module (membership residual " +
                std::to_string(r) + ")");
}

double norm(const ModuleVector& s) {
  double m = 0.0;
  for (const auto& e : s.entries()) m = std::max(m, norm(e));
  return m;
}

double dist(const ModuleVector& s, const ModuleVector& t) {
  if (s.n() != t.n()) throw BadDimension("vector lengths differ");
  double m = 0.0;
  for (int i = 0; i < s.n(); ++i) m = std::max(m, norm(s.at(i) - t.at(i)));
  return m;
}

std::vector<AlgebraElement> mat_vec(const MatrixElement& x,
                                    std::span<const AlgebraElement> v) {
  if (static_cast<int>(v.size()) != x.n())
    throw BadDimension("matrix/vector size mismatch");
  std::vector<AlgebraElement> out;
  out.reserve(x.n());
  for (int i = 0; i < x.n(); ++i) {
    AlgebraElement s = AlgebraElement::zero(x.backend());
    for (int j = 0; j < x.n(); ++j) s = s + x.at(i, j) * v[j];
    out.push_back(std::move(s));
  }
  return out;
}

ModuleVector project_vector(const ModulePtr& E,
                            std::span<const AlgebraElement> v) {
  return ModuleVector(E, mat_vec(E->p(), v));
}

ModuleVector generator(const ModulePtr& E, int i) {
  if (i < 0 || i >= E->n()) throw BadDimension("generator index out of range");
  std::vector<AlgebraElement> e(E->n(), AlgebraElement::zero(E->backend()));
  e[i] = AlgebraElement::unit(E->backend());
  return project_vector(E, e);
}

ModuleVector module_act(const ModuleVector& s, const AlgebraElement& a) {
  std::vector<AlgebraElement> v;
  v.reserve(s.n());
  for (const auto& e : s.entries()) v.push_back(e * a);
  return ModuleVector(s.module(), std::move(v));
}

ModuleVector operator+(const ModuleVector& s, const ModuleVector& t) {
  if (s.n() != t.n()) throw BadDimension("vector lengths differ");
  std::vector<AlgebraElement> v;
  v.reserve(s.n());
  for (int i = 0; i < s.n(); ++i) v.push_back(s.at(i) + t.at(i));
  return ModuleVector(s.module(), std::move(v));
}

ModuleVector operator-(const ModuleVector& s, const ModuleVector& t) {
  return s + Complex(-1.0, 0.0) * t;
}

ModuleVector operator*(Complex c, const ModuleVector& s) {
  std::vector<AlgebraElement> v;
  v.reserve(s.n());
  for (const auto& e : s.entries()) v.push_back(c * e);
  return ModuleVector(s.module(), std::move(v));
}

ModuleHom::ModuleHom(ModulePtr source, ModulePtr target, MatrixElement x)
    : source_(std::move(source)), target_(std::move(target)), x_(std::move(x)) {
  require_same_backend(source_->backend(), target_->backend());
  if (source_->n() != target_->n())
    throw BadDimension(
        "hom requires equal presentation sizes (pad with embed_tilde)");
  if (x_.n() != source_->n()) throw BadDimension("hom matrix has wrong size");
  const double scale = std::max(1.0, norm(x_));
  const double tol = x_.backend()->tol * 10.0;
  if (norm(target_->p() * x_ - x_) > scale * tol ||
      norm(x_ * source_->p() - x_) > scale * tol)
    throw Error("hom matrix violates the corner constraints qx = x = xp");
}

ModuleVector hom_apply(const ModuleHom& h, const ModuleVector& s) {
  if (s.module()->n() != h.source()->n())
    throw BadDimension("vector does not match the hom source");
  return ModuleVector(h.target(), mat_vec(h.matrix(), s.entries()));
}

ModuleHom compose(const ModuleHom& g, const ModuleHom& h) {
  return ModuleHom(h.source(), g.target(), g.matrix() * h.matrix());
}

ModuleHom identity_hom(const ModulePtr& E) {
  return ModuleHom(E, E, E->p());
}

ModuleHom end_algebra_invert(const ModuleHom& h) {
  if (h.source() != h.target() &&
      norm(h.source()->p() - h.target()->p()) > h.matrix().backend()->tol)
    throw BadDimension("endomorphism inversion requires source = target");
  return ModuleHom(h.source(), h.source(),
                   corner_invert(h.matrix(), h.source()->idem()));
}

TwistedModule twist_module(const ModulePtr& E, const Automorphism& psi) {
  const MatrixElement pprime = apply(inverse(psi), E->p());
  const IdempotentCheck chk = is_idempotent(pprime);
  Idempotent ip = chk.ok ? Idempotent(pprime) : retract_idempotent(pprime);
  return TwistedModule{make_module(std::move(ip)), E, psi};
}

ModuleVector apply_intertwiner(const TwistedModule& tw,
                               const ModuleVector& s) {
  if (s.module()->n() != tw.twisted->n())
    throw BadDimension("vector does not live in the twisted module");
  std::vector<AlgebraElement> v;
  v.reserve(s.n());
  for (const auto& e : s.entries()) v.push_back(apply(tw.psi, e));
  return ModuleVector(tw.original, std::move(v));
}

}  // namespace projmod
