#include <cmath>
#include <numbers>

#include "doctest.h"
#include "projmod/connection.hpp"
#include "testutil.hpp"

using namespace projmod;
using namespace projmod::testutil;

namespace {

std::vector<AlgebraElement> random_tuple(const BackendPtr& b, int n, int band,
                                         double mag, Rng& rng) {
  std::vector<AlgebraElement> v;
  for (int i = 0; i < n; ++i) v.push_back(random_element(b, band, mag, rng));
  return v;
}

std::vector<AlgebraElement> mode_generators(const BackendPtr& b) {
  return {mono(b, {1, 0}), mono(b, {0, 1}), mono(b, {-1, 0}), mono(b, {0, -1})};
}

BasisPtr inner_matrix_basis(const BackendPtr& b, Rng& rng) {
  return make_basis({Derivation::inner(random_element(b, 0, 1.0, rng)),
                     Derivation::inner(random_element(b, 0, 1.0, rng))});
}

}  // namespace

TEST_CASE("gamma of a derivation") {
  auto b = torus2();
  Rng rng(81);

  SUBCASE("constant idempotent gives zero") {
    MatrixElement cp(2, b);
    cp.set(0, 0, AlgebraElement::unit(b));
    const Idempotent p(cp);
    CHECK(norm(gamma_of_derivation(Derivation::basis(b, 0), p)) == 0.0);
  }
  SUBCASE("commutator identity and corner annihilation") {
    const Idempotent p = soft_idempotent(b, 2, rng);
    for (int j = 0; j < 2; ++j) {
      const Derivation d = Derivation::basis(b, j);
      const MatrixElement g = gamma_of_derivation(d, p);
      const MatrixElement dp = apply(d, p.matrix());
      CHECK(norm(p.matrix() * g - g * p.matrix() - dp) <= 1e-10);
      CHECK(norm(p.matrix() * dp * p.matrix()) <= 1e-11);
      const MatrixElement c = p.complement();
      CHECK(norm(c * dp * c) <= 1e-11);
    }
  }
  SUBCASE("inner derivation over the dense oracle backend") {
    auto mb = matrix3();
    Rng mrng(83);
    const Idempotent p = soft_idempotent(mb, 2, mrng);
    const Derivation d = Derivation::inner(random_element(mb, 0, 1.0, mrng));
    const MatrixElement g = gamma_of_derivation(d, p);
    const MatrixElement dp = apply(d, p.matrix());
    CHECK(norm(p.matrix() * g - g * p.matrix() - dp) <= 1e-12);
  }
}

TEST_CASE("covariant derivative") {
  auto b = torus2();
  Rng rng(87);
  auto basis = standard_torus_basis(b);

  SUBCASE("free module with zero offset is plain differentiation") {
    ModulePtr F = make_free_module(2, b);
    const Connection c = Connection::levi_civita(F, basis);
    const ModuleVector s = project_vector(F, random_tuple(b, 2, 2, 1.0, rng));
    const ModuleVector ds = covariant_derivative(c, 0, s);
    for (int i = 0; i < 2; ++i)
      CHECK(dist(ds.at(i), apply(basis->elements[0], s.at(i))) < 1e-13);
  }
  SUBCASE("the two covariant derivative formulas agree") {
    ModulePtr E = make_module(soft_idempotent(b, 2, rng));
    const Connection c = Connection::levi_civita(E, basis);
    for (int j = 0; j < 2; ++j) {
      const Derivation& d = basis->elements[j];
      const MatrixElement g = gamma_of_derivation(d, E->idem());
      for (int t = 0; t < 3; ++t) {
        const ModuleVector s =
            project_vector(E, random_tuple(b, 2, 2, 1.0, rng));
        const ModuleVector lhs = covariant_derivative(c, j, s);
        // gamma(D) s + D.s
        std::vector<AlgebraElement> rhs = mat_vec(g, s.entries());
        for (int i = 0; i < 2; ++i)
          rhs[i] = rhs[i] + apply(d, s.at(i));
        CHECK(dist(lhs, ModuleVector(E, rhs)) <= 1e-10);
      }
    }
  }
  SUBCASE("Leibniz rule") {
    ModulePtr E = make_module(soft_idempotent(b, 2, rng));
    const Connection c = Connection::levi_civita(E, basis);
    for (int t = 0; t < 3; ++t) {
      const ModuleVector s = project_vector(E, random_tuple(b, 2, 2, 1.0, rng));
      const AlgebraElement a = random_element(b, 2, 1.0, rng);
      const ModuleVector lhs = covariant_derivative(c, 1, module_act(s, a));
      const ModuleVector rhs =
          module_act(covariant_derivative(c, 1, s), a) +
          module_act(s, apply(basis->elements[1], a));
      CHECK(dist(lhs, rhs) <= 1e-10);
    }
  }
  SUBCASE("results stay in the module") {
    ModulePtr E = make_module(soft_idempotent(b, 2, rng));
    const Connection c = Connection::levi_civita(E, basis);
    const ModuleVector s = project_vector(E, random_tuple(b, 2, 2, 1.0, rng));
    const ModuleVector ds = covariant_derivative(c, 0, s);
    CHECK(membership_residual(E, ds.entries()) <= 1e-9);
  }
  SUBCASE("unknown derivations are rejected") {
    ModulePtr E = make_module(soft_idempotent(b, 2, rng));
    const Connection c = Connection::levi_civita(E, basis);
    const ModuleVector s = project_vector(E, random_tuple(b, 2, 2, 1.0, rng));
    const Derivation ad_u = Derivation::inner(random_element(b, 1, 1.0, rng));
    // inner derivations are not in the torus basis (and act as zero on a
    // commutative backend, but the basis lookup must still reject them)
    CHECK_THROWS_AS((void)covariant_derivative(c, ad_u, s),
                    UnknownDerivation);
    // linear combinations of basis elements are fine
    const Derivation comb = 0.5 * basis->elements[0] + (-2.0) * basis->elements[1];
    CHECK_NOTHROW((void)covariant_derivative(c, comb, s));
  }
}

TEST_CASE("gauge transformations") {
  auto b = torus2();
  Rng rng(91);
  auto basis = standard_torus_basis(b);

  SUBCASE("the corner unit is a fixed point") {
    ModulePtr E = make_module(soft_idempotent(b, 2, rng));
    std::vector<MatrixElement> alpha;
    for (int j = 0; j < 2; ++j)
      alpha.push_back(
          corner_project(random_matrix(b, 2, 1, 0.3, rng), E->idem()));
    const Connection c(E, basis, alpha);
    const Connection cg = gauge_transform(c, identity_hom(E));
    for (int j = 0; j < 2; ++j)
      CHECK(dist(cg.alpha(j), c.alpha(j)) <= 1e-10);
  }
  SUBCASE("single-mode gauge on the free line gives the logarithmic derivative") {
    ModulePtr F = make_free_module(1, b);
    const Connection c = Connection::levi_civita(F, basis);
    MatrixElement g(1, b);
    g.set(0, 0, mono(b, {2, -1}));
    const Connection cg = gauge_transform(c, ModuleHom(F, F, g));
    const double two_pi = 2.0 * std::numbers::pi;
    // alpha'(delta_j) = 2 pi i k_j
    MatrixElement expect0(1, b), expect1(1, b);
    expect0.set(0, 0, AlgebraElement::scalar(b, Complex(0.0, two_pi * 2)));
    expect1.set(0, 0, AlgebraElement::scalar(b, Complex(0.0, two_pi * -1)));
    CHECK(dist(cg.alpha(0), expect0) <= 1e-10);
    CHECK(dist(cg.alpha(1), expect1) <= 1e-10);
  }
  SUBCASE("central gauges fix every connection") {
    ModulePtr E = make_module(soft_idempotent(b, 2, rng));
    std::vector<MatrixElement> alpha;
    for (int j = 0; j < 2; ++j)
      alpha.push_back(
          corner_project(random_matrix(b, 2, 1, 0.3, rng), E->idem()));
    const Connection c(E, basis, alpha);
    const ModuleHom g(E, E, Complex(2.0, 1.0) * E->p());
    const Connection cg = gauge_transform(c, g);
    for (int j = 0; j < 2; ++j)
      CHECK(dist(cg.alpha(j), c.alpha(j)) <= 1e-10);
  }
  SUBCASE("the difference of two connections is A-linear") {
    ModulePtr E = make_module(soft_idempotent(b, 2, rng));
    std::vector<MatrixElement> alpha, beta;
    for (int j = 0; j < 2; ++j) {
      alpha.push_back(
          corner_project(random_matrix(b, 2, 1, 0.3, rng), E->idem()));
      beta.push_back(
          corner_project(random_matrix(b, 2, 1, 0.3, rng), E->idem()));
    }
    const Connection ca(E, basis, alpha), cb2(E, basis, beta);
    for (int j = 0; j < 2; ++j) {
      const ModuleVector s = project_vector(E, random_tuple(b, 2, 2, 1.0, rng));
      const AlgebraElement a = random_element(b, 2, 1.0, rng);
      const ModuleVector diff_sa =
          covariant_derivative(ca, j, module_act(s, a)) -
          covariant_derivative(cb2, j, module_act(s, a));
      const ModuleVector diff_s_a = module_act(
          covariant_derivative(ca, j, s) - covariant_derivative(cb2, j, s), a);
      CHECK(dist(diff_sa, diff_s_a) <= 1e-12);
    }
  }
  SUBCASE("right action property") {
    ModulePtr E = make_module(soft_idempotent(b, 2, rng));
    const Connection c = Connection::levi_civita(E, basis);
    const ModuleHom g(
        E, E,
        E->p() + corner_project(random_matrix(b, 2, 1, 0.05, rng), E->idem()));
    const ModuleHom h(
        E, E,
        E->p() + corner_project(random_matrix(b, 2, 1, 0.05, rng), E->idem()));
    const Connection lhs = gauge_transform(gauge_transform(c, g), h);
    const Connection rhs = gauge_transform(c, compose(g, h));
    for (int j = 0; j < 2; ++j)
      CHECK(dist(lhs.alpha(j), rhs.alpha(j)) <= 1e-9);
  }
}

TEST_CASE("covariant coordinates") {
  Rng rng(97);

  SUBCASE("commutative backends are already covariant") {
    auto b = torus2();
    ModulePtr E = make_module(soft_idempotent(b, 2, rng));
    const Connection c = Connection::levi_civita(E, standard_torus_basis(b));
    const AlgebraElement a = random_element(b, 2, 1.0, rng);
    auto gens = mode_generators(b);
    const auto rep = covariant_coordinate(a, c, gens, rng);
    CHECK(rep.max_commutator <= 1e-12);
    CHECK(rep.pass);
  }
  SUBCASE("quantum torus free line") {
    auto q = nctorus_golden();
    ModulePtr F = make_free_module(1, q);
    const Connection c = Connection::levi_civita(F, standard_torus_basis(q));
    auto gens = mode_generators(q);
    for (const auto& a : gens) {
      const auto rep = covariant_coordinate(a, c, gens, rng);
      CHECK(rep.max_commutator <= 1e-10);
    }
  }
  SUBCASE("dense backend") {
    auto mb = matrix3();
    Rng mrng(101);
    ModulePtr E = make_module(soft_idempotent(mb, 2, mrng));
    const Connection c = Connection::levi_civita(E, inner_matrix_basis(mb, mrng));
    const AlgebraElement a = random_element(mb, 0, 1.0, mrng);
    std::vector<AlgebraElement> gens{random_element(mb, 0, 1.0, mrng),
                                     random_element(mb, 0, 1.0, mrng)};
    const auto rep = covariant_coordinate(a, c, gens, mrng);
    CHECK(rep.max_commutator <= 1e-12);
  }
}

TEST_CASE("derivative endomorphism check") {
  auto b = torus2();
  Rng rng(103);
  ModulePtr E = make_module(soft_idempotent(b, 2, rng));
  auto basis = standard_torus_basis(b);
  auto gens = mode_generators(b);

  SUBCASE("A-linear corner maps pass with the zero derivation") {
    const DerivativeEndomorphism phi{
        corner_project(random_matrix(b, 2, 1, 1.0, rng), E->idem()),
        Derivation::zero(b)};
    const auto rep = dend_check(phi, E, gens, rng);
    CHECK(rep.pass);
    CHECK(rep.relation_residual <= 1e-11);
  }
  SUBCASE("the Levi-Civita covariant derivative is a derivative endomorphism") {
    const DerivativeEndomorphism phi{
        gamma_of_derivation(basis->elements[0], E->idem()),
        basis->elements[0]};
    const auto rep = dend_check(phi, E, gens, rng);
    CHECK(rep.pass);
    CHECK(rep.relation_residual <= 1e-10);
    CHECK(rep.membership_residual <= 1e-10);
  }
  SUBCASE("right multiplications pair with inner derivations") {
    // (rho(a), -ad a) is a derivative endomorphism
    auto q = nctorus_golden();
    ModulePtr F = make_free_module(2, q);
    Rng qrng(107);
    const AlgebraElement a = random_element(q, 2, 1.0, qrng);
    MatrixElement rho_a(2, q);
    // right multiplication as an operator has no matrix part; present it
    // through the relation by checking directly
    std::vector<AlgebraElement> qgens{mono(q, {1, 0}), mono(q, {0, 1})};
    for (const auto& bgen : qgens) {
      const ModuleVector s =
          project_vector(F, random_tuple(q, 2, 2, 1.0, qrng));
      // [rho(a), rho(b)] s = rho(-ad a (b)) s
      const ModuleVector lhs =
          module_act(module_act(s, bgen), a) - module_act(module_act(s, a), bgen);
      const AlgebraElement ada_b = a * bgen - bgen * a;
      const ModuleVector rhs = module_act(s, Complex(-1.0, 0.0) * ada_b);
      CHECK(dist(lhs, rhs) <= 1e-11);
    }
    (void)rho_a;
  }
  SUBCASE("a bare derivation without the gamma correction escapes the module") {
    const DerivativeEndomorphism phi{MatrixElement::zero(2, b),
                                     basis->elements[0]};
    const auto rep = dend_check(phi, E, gens, rng);
    CHECK_FALSE(rep.pass);
    CHECK(rep.membership_residual > 1e-6);
  }
}

TEST_CASE("curvature report") {
  Rng rng(109);

  SUBCASE("free modules are flat") {
    auto b = torus2();
    ModulePtr F = make_free_module(2, b);
    const Connection c = Connection::levi_civita(F, standard_torus_basis(b));
    const auto rep = curvature(c, 0, 1, rng);
    CHECK(norm(rep.value) <= 1e-12);
    CHECK(rep.a_linearity_residual <= 1e-12);
  }
  SUBCASE("soft idempotents carry curvature but stay A-linear") {
    auto b = torus2();
    ModulePtr E = make_module(soft_idempotent(b, 2, rng));
    const Connection c = Connection::levi_civita(E, standard_torus_basis(b));
    const auto rep = curvature(c, 0, 1, rng);
    CHECK(rep.a_linearity_residual <= 1e-9);
    // the corner value reproduces the operator on generators
    const MatrixElement& F01 = rep.value;
    CHECK(norm(corner_project(F01, E->idem()) - F01) <= 1e-10);
  }
  SUBCASE("inner-basis curvature on the dense backend") {
    auto mb = matrix3();
    Rng mrng(113);
    ModulePtr E = make_module(soft_idempotent(mb, 2, mrng));
    const Connection c = Connection::levi_civita(E, inner_matrix_basis(mb, mrng));
    const auto rep = curvature(c, 0, 1, mrng);
    CHECK(rep.a_linearity_residual <= 1e-11);
  }
}
