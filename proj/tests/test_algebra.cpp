#include <cmath>
#include <numbers>

#include "doctest.h"
#include "testutil.hpp"

using namespace projmod;
using namespace projmod::testutil;

namespace {
const double kTwoPi = 2.0 * std::numbers::pi;
}

TEST_CASE("unit law and single-mode products") {
  auto b = torus1(4, 16);
  Rng rng(7);
  const AlgebraElement a = random_element(b, 3, 1.0, rng);
  CHECK(dist(AlgebraElement::unit(b) * a, a) < 1e-14);
  CHECK(dist(a * AlgebraElement::unit(b), a) < 1e-14);

  // characters convolve to the mode sum: e_1 e_2 = e_3
  CHECK(dist(mono(b, {1}) * mono(b, {2}), mono(b, {3})) < 1e-15);
}

TEST_CASE("twisted product: opposite orders differ by the deformation phase") {
  const double theta = 0.6180339887;
  auto b = nctorus_golden();
  const AlgebraElement u = mono(b, {1, 0});
  const AlgebraElement v = mono(b, {0, 1});
  const AlgebraElement uv = u * v;
  const AlgebraElement vu = v * u;
  // both are multiples of e_{(1,1)}; the coefficient ratio is the
  // deformation phase (stated orientation-independently)
  const std::vector<int> k{1, 1};
  const Complex ratio = uv.coeff(k) / vu.coeff(k);
  CHECK(std::abs(std::abs(ratio) - 1.0) < 1e-14);
  const Complex fwd = std::polar(1.0, kTwoPi * theta);
  const Complex bwd = std::conj(fwd);
  CHECK(std::min(std::abs(ratio - fwd), std::abs(ratio - bwd)) < 1e-12);
}

TEST_CASE("inversion on the commutative torus") {
  auto b = torus1();
  SUBCASE("unit") {
    CHECK(dist(inverse(AlgebraElement::unit(b)), AlgebraElement::unit(b)) <
          1e-12);
  }
  SUBCASE("2 + cos is invertible with verified residual") {
    const AlgebraElement f = AlgebraElement::from_coeffs(
        b, {{{0}, 2.0}, {{1}, 0.5}, {{-1}, 0.5}});
    const AlgebraElement g = inverse(f);
    CHECK(norm(f * g - AlgebraElement::unit(b)) <= 1e-9);
    CHECK(norm(g * f - AlgebraElement::unit(b)) <= 1e-9);
  }
  SUBCASE("cos vanishes on the circle") {
    const AlgebraElement f =
        AlgebraElement::from_coeffs(b, {{{1}, 0.5}, {{-1}, 0.5}});
    CHECK_THROWS_AS((void)inverse(f), NotInvertible);
  }
}

TEST_CASE("norms") {
  auto b = torus1();
  CHECK(norm(AlgebraElement::zero(b)) == 0.0);
  CHECK(norm(mono(b, {3})) == 1.0);
  const AlgebraElement f =
      AlgebraElement::from_coeffs(b, {{{0}, 2.0}, {{1}, 0.5}, {{-1}, 0.5}});
  CHECK(norm(f) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("derivations") {
  auto b = torus2(4, 16);
  const Derivation d1 = Derivation::basis(b, 0);

  SUBCASE("kills the unit") {
    CHECK(norm(apply(d1, AlgebraElement::unit(b))) == 0.0);
  }
  SUBCASE("single-mode differentiation") {
    const AlgebraElement e10 = mono(b, {1, 0});
    CHECK(dist(apply(d1, e10), Complex(0.0, kTwoPi) * e10) < 1e-14);
  }
  SUBCASE("Leibniz rule on random band-3 pairs") {
    Rng rng(11);
    for (int t = 0; t < 5; ++t) {
      const AlgebraElement a = random_element(b, 3, 1.0, rng);
      const AlgebraElement c = random_element(b, 3, 1.0, rng);
      const AlgebraElement lhs = apply(d1, a * c);
      const AlgebraElement rhs = apply(d1, a) * c + a * apply(d1, c);
      CHECK(dist(lhs, rhs) < 1e-10);
    }
  }
  SUBCASE("inner derivations satisfy Leibniz on the quantum torus") {
    auto q = nctorus_golden();
    Rng rng(12);
    const AlgebraElement u = random_element(q, 2, 1.0, rng);
    const Derivation ad_u = Derivation::inner(u);
    const AlgebraElement a = random_element(q, 2, 1.0, rng);
    const AlgebraElement c = random_element(q, 2, 1.0, rng);
    CHECK(dist(apply(ad_u, a * c), apply(ad_u, a) * c + a * apply(ad_u, c)) <
          1e-10);
  }
}

TEST_CASE("automorphisms") {
  auto b = torus2(4, 16);
  Rng rng(13);
  const AlgebraElement a = random_element(b, 3, 1.0, rng);

  SUBCASE("identity translation") {
    const Automorphism t0 =
        Automorphism::translation(b, Eigen::VectorXd::Zero(2));
    CHECK(t0.is_identity());
    CHECK(dist(apply(t0, a), a) == 0.0);
  }
  SUBCASE("mode phase shift") {
    Eigen::VectorXd v(2);
    v << 0.3, -0.15;
    const Automorphism tv = Automorphism::translation(b, v);
    const AlgebraElement ek = mono(b, {2, 1});
    const Complex expected =
        std::polar(1.0, kTwoPi * (2 * v[0] + 1 * v[1]));
    CHECK(dist(apply(tv, ek), expected * ek) < 1e-14);
  }
  SUBCASE("group law") {
    Eigen::VectorXd v(2), w(2);
    v << 0.21, 0.05;
    w << -0.4, 0.33;
    const Automorphism tv = Automorphism::translation(b, v);
    const Automorphism tw = Automorphism::translation(b, w);
    const Automorphism tvw = Automorphism::translation(b, v + w);
    CHECK(dist(apply(compose(tv, tw), a), apply(tvw, a)) < 1e-13);
  }
  SUBCASE("multiplicative on products") {
    Eigen::VectorXd v(2);
    v << 0.11, 0.07;
    const Automorphism tv = Automorphism::translation(b, v);
    const AlgebraElement c = random_element(b, 3, 1.0, rng);
    CHECK(dist(apply(tv, a * c), apply(tv, a) * apply(tv, c)) < 1e-10);
  }
  SUBCASE("inner automorphism on the quantum torus") {
    auto q = nctorus_golden();
    const AlgebraElement u =
        AlgebraElement::unit(q) + Complex(0.2, 0.1) * mono(q, {1, 0});
    const Automorphism cu = Automorphism::inner(u);
    const AlgebraElement x = random_element(q, 2, 1.0, rng);
    const AlgebraElement y = random_element(q, 2, 1.0, rng);
    CHECK(dist(apply(cu, x * y), apply(cu, x) * apply(cu, y)) < 1e-9);
    CHECK(dist(apply(compose(cu, inverse(cu)), x), x) < 1e-9);
  }
}

TEST_CASE("translation flow differentiates to the basis derivations") {
  auto b = torus2(4, 16);
  Rng rng(17);
  const AlgebraElement a = random_element(b, 2, 0.2, rng);
  Eigen::VectorXd v(2);
  v << 0.3, -0.2;
  const double h = 1e-5;
  const AlgebraElement plus =
      apply(Automorphism::translation(b, (h * v).eval()), a);
  const AlgebraElement minus =
      apply(Automorphism::translation(b, (-h * v).eval()), a);
  const AlgebraElement fd = Complex(1.0 / (2.0 * h), 0.0) * (plus - minus);
  const AlgebraElement exact =
      apply(Derivation::translation_generator(b, v), a);
  CHECK(dist(fd, exact) < 1e-6);
}

TEST_CASE("ring identities on random band-limited triples") {
  auto b = torus2(4, 32);
  Rng rng(19);
  for (int t = 0; t < 4; ++t) {
    const AlgebraElement a = random_element(b, 2, 1.0, rng);
    const AlgebraElement c = random_element(b, 2, 1.0, rng);
    const AlgebraElement d = random_element(b, 2, 1.0, rng);
    CHECK(dist((a * c) * d, a * (c * d)) < 1e-12);
    CHECK(dist(a * (c + d), a * c + a * d) < 1e-12);
  }
  // and on the quantum torus, where ordering matters
  auto q = nctorus_golden(4, 32);
  for (int t = 0; t < 4; ++t) {
    const AlgebraElement a = random_element(q, 2, 1.0, rng);
    const AlgebraElement c = random_element(q, 2, 1.0, rng);
    const AlgebraElement d = random_element(q, 2, 1.0, rng);
    CHECK(dist((a * c) * d, a * (c * d)) < 1e-12);
  }
}

TEST_CASE("band cap is a hard error") {
  auto b = make_torus(1, 2, 4);
  const AlgebraElement e2 = mono(b, {2});
  const AlgebraElement e4 = e2 * e2;
  CHECK(e4.degree() == 4);
  CHECK_THROWS_AS((void)(e4 * e2), DegreeOverflow);
}

TEST_CASE("backend mismatch is rejected") {
  auto b1 = torus1();
  auto b2 = torus2();
  CHECK_THROWS_AS((void)(AlgebraElement::unit(b1) + AlgebraElement::unit(b2)),
                  BackendMismatch);
}

TEST_CASE("dense backend arithmetic and inversion") {
  auto b = matrix3();
  Rng rng(23);
  const AlgebraElement a = random_element(b, 0, 1.0, rng);
  const AlgebraElement u =
      AlgebraElement::unit(b) + Complex(0.25, 0.0) * a;
  const AlgebraElement ui = inverse(u);
  CHECK(norm(u * ui - AlgebraElement::unit(b)) <= 1e-9);
  CHECK(norm(ui * u - AlgebraElement::unit(b)) <= 1e-9);
  CHECK_THROWS_AS((void)inverse(AlgebraElement::zero(b)), NotInvertible);
}

TEST_CASE("quantum torus inversion by Newton-Schulz") {
  auto q = nctorus_golden();
  Rng rng(29);
  const AlgebraElement h = random_element(q, 2, 0.02, rng);
  const AlgebraElement u = AlgebraElement::unit(q) + h;
  const AlgebraElement ui = inverse(u);
  CHECK(norm(u * ui - AlgebraElement::unit(q)) <= 1e-9);
  CHECK(norm(ui * u - AlgebraElement::unit(q)) <= 1e-9);
  // unitary generator: inverse equals the star element
  const AlgebraElement e10 = mono(q, {1, 0});
  CHECK(dist(inverse(e10), adjoint(e10)) < 1e-9);
}

TEST_CASE("grid transform round trip") {
  auto b = torus2(4, 16);
  Rng rng(31);
  const AlgebraElement a = random_element(b, 3, 1.0, rng);
  const int grid = 16;
  const AlgebraElement back =
      from_grid_values(b, grid_values(a, grid), grid, 3);
  CHECK(dist(a, back) < 1e-12);
  // point evaluation agrees with the grid
  const Eigen::VectorXcd vals = grid_values(a, grid);
  const double x[2] = {3.0 / grid, 7.0 / grid};
  CHECK(std::abs(evaluate(a, x) - vals[3 * grid + 7]) < 1e-12);
}
