#include "doctest.h"
#include "projmod/matrix_ring.hpp"
#include "testutil.hpp"

using namespace projmod;
using namespace projmod::testutil;

TEST_CASE("ring axioms and matrix units") {
  auto b = torus2(4, 32);
  Rng rng(301);
  const MatrixElement id = MatrixElement::identity(2, b);
  const MatrixElement x = random_matrix(b, 2, 2, 1.0, rng);
  CHECK(dist(id * x, x) < 1e-14);
  CHECK(dist(x * id, x) < 1e-14);

  // E12 E21 = E11 over the unit
  MatrixElement e12(2, b), e21(2, b), e11(2, b);
  e12.set(0, 1, AlgebraElement::unit(b));
  e21.set(1, 0, AlgebraElement::unit(b));
  e11.set(0, 0, AlgebraElement::unit(b));
  CHECK(dist(e12 * e21, e11) == 0.0);

  const MatrixElement y = random_matrix(b, 2, 2, 1.0, rng);
  const MatrixElement z = random_matrix(b, 2, 2, 1.0, rng);
  CHECK(dist((x * y) * z, x * (y * z)) < 1e-12);
  CHECK(dist(x * (y + z), x * y + x * z) < 1e-12);
}

TEST_CASE("inversion over the commutative torus") {
  auto b = torus2();
  Rng rng(307);
  SUBCASE("identity") {
    const MatrixElement id = MatrixElement::identity(2, b);
    CHECK(dist(inverse(id), id) < 1e-12);
  }
  SUBCASE("diagonally dominant matrices invert with verified residual") {
    const MatrixElement x =
        MatrixElement::identity(2, b) + random_matrix(b, 2, 2, 0.2, rng);
    const MatrixElement xi = inverse(x);
    const MatrixElement id = MatrixElement::identity(2, b);
    CHECK(norm(x * xi - id) <= 1e-9);
    CHECK(norm(xi * x - id) <= 1e-9);
    // double inversion returns the element
    CHECK(dist(inverse(xi), x) <= 1e-9);
  }
  SUBCASE("singular matrices are rejected") {
    MatrixElement x(2, b);
    x.set(0, 0, AlgebraElement::unit(b));  // rank one
    CHECK_THROWS_AS((void)inverse(x), NotInvertible);
  }
}

TEST_CASE("Newton-Schulz inversion over the quantum torus") {
  auto q = nctorus_golden();
  Rng rng(311);
  const MatrixElement x =
      MatrixElement::identity(2, q) + random_matrix(q, 2, 2, 0.15, rng);
  const MatrixElement xi = inverse(x);
  const MatrixElement id = MatrixElement::identity(2, q);
  CHECK(norm(x * xi - id) <= 1e-9);
  CHECK(norm(xi * x - id) <= 1e-9);
}

TEST_CASE("entrywise actions") {
  auto b = torus2(4, 32);
  Rng rng(313);
  const MatrixElement x = random_matrix(b, 2, 2, 1.0, rng);
  const MatrixElement y = random_matrix(b, 2, 2, 1.0, rng);

  SUBCASE("identity automorphism is the identity") {
    CHECK(dist(apply(Automorphism::identity(b), x), x) == 0.0);
  }
  SUBCASE("automorphisms are multiplicative on matrices") {
    Eigen::VectorXd v(2);
    v << 0.17, -0.06;
    const Automorphism tv = Automorphism::translation(b, v);
    CHECK(dist(apply(tv, x * y), apply(tv, x) * apply(tv, y)) <= 1e-10);
  }
  SUBCASE("derivations satisfy the Leibniz rule on matrices") {
    const Derivation d = Derivation::basis(b, 1);
    CHECK(dist(apply(d, x * y), apply(d, x) * y + x * apply(d, y)) <= 1e-10);
  }
  SUBCASE("the entrywise action on matrix units reproduces the scalar case") {
    const AlgebraElement a = random_element(b, 2, 1.0, rng);
    MatrixElement unit_a(2, b);
    unit_a.set(0, 1, a);
    const Derivation d = Derivation::basis(b, 0);
    const MatrixElement da = apply(d, unit_a);
    CHECK(dist(da.at(0, 1), apply(d, a)) == 0.0);
    CHECK(norm(da.at(0, 0)) == 0.0);
  }
}

TEST_CASE("norm is submultiplicative") {
  auto b = torus2(4, 32);
  Rng rng(317);
  for (int t = 0; t < 3; ++t) {
    const MatrixElement x = random_matrix(b, 2, 2, 1.0, rng);
    const MatrixElement y = random_matrix(b, 2, 2, 1.0, rng);
    CHECK(norm(x * y) <= norm(x) * norm(y) * (1.0 + 1e-12));
  }
}
