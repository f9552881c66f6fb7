#include <cmath>

#include "doctest.h"
#include "projmod/idempotent.hpp"
#include "testutil.hpp"

using namespace projmod;
using namespace projmod::testutil;

namespace {

// M_n(A) with A = C, realized as the 1 x 1 dense backend: lets every case
// here be cross-checked against plain Eigen arithmetic.
BackendPtr scalarC() { return make_matrix_backend(1); }

AlgebraElement c1(const BackendPtr& b, Complex z) {
  Eigen::MatrixXcd m(1, 1);
  m(0, 0) = z;
  return AlgebraElement::from_matrix(b, m);
}

MatrixElement from2x2(const BackendPtr& b, const Eigen::Matrix2cd& m) {
  MatrixElement x(2, b);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) x.set(i, j, c1(b, m(i, j)));
  return x;
}

Eigen::Matrix2cd to2x2(const MatrixElement& x) {
  Eigen::Matrix2cd m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = x.at(i, j).matrix()(0, 0);
  return m;
}

Eigen::Matrix2cd rot(double angle) {
  Eigen::Matrix2cd r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

const Eigen::Matrix2cd kDiag10 = Eigen::Vector2cd(1.0, 0.0).asDiagonal();

}  // namespace

TEST_CASE("idempotency check") {
  auto b = scalarC();
  const MatrixElement p = from2x2(b, kDiag10);
  auto ok = is_idempotent(p);
  CHECK(ok.ok);
  CHECK(ok.residual == 0.0);

  const MatrixElement half =
      Complex(0.5, 0.0) * MatrixElement::identity(2, b);
  auto bad = is_idempotent(half);
  CHECK_FALSE(bad.ok);
  CHECK(bad.residual == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("cubic retraction") {
  auto b = scalarC();
  SUBCASE("exact idempotent is a fixed point") {
    const Idempotent p = retract_idempotent(from2x2(b, kDiag10));
    CHECK(dist(p.matrix(), from2x2(b, kDiag10)) == 0.0);
  }
  SUBCASE("scalar 1.1 retracts to 1") {
    MatrixElement x(1, b);
    x.set(0, 0, c1(b, 1.1));
    const Idempotent p = retract_idempotent(x);
    CHECK(std::abs(p.matrix().at(0, 0).matrix()(0, 0) - 1.0) < 1e-12);
  }
  SUBCASE("the repelling midpoint does not converge") {
    MatrixElement x(1, b);
    x.set(0, 0, c1(b, 0.5));
    CHECK_THROWS_AS((void)retract_idempotent(x), NoConvergence);
  }
}

TEST_CASE("similarity witness") {
  auto b = scalarC();
  const Idempotent p(from2x2(b, kDiag10));

  SUBCASE("witness at q = p is the identity") {
    const SimilarityWitness w = similarity_witness(p, p);
    CHECK(dist(w.s, MatrixElement::identity(2, b)) < 1e-14);
    CHECK(w.residual < 1e-14);
  }
  SUBCASE("rotated idempotent, cross-checked densely") {
    const Eigen::Matrix2cd g = rot(0.3);
    const Eigen::Matrix2cd qm = g * kDiag10 * g.inverse();
    const Idempotent q(from2x2(b, qm));
    const SimilarityWitness w = similarity_witness(p, q);
    CHECK(w.residual <= 1e-12);
    // dense oracle for the witness formula s = pq + (1-p)(1-q)
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    const Eigen::Matrix2cd s_oracle =
        kDiag10 * qm + (id - kDiag10) * (id - qm);
    CHECK((to2x2(w.s) - s_oracle).cwiseAbs().maxCoeff() < 1e-14);
    // defining exchange relation holds exactly up to rounding
    CHECK(dist(w.s * q.matrix(), p.matrix() * w.s) < 1e-14);
  }
  SUBCASE("orthogonal idempotents annihilate") {
    const Idempotent q(
        from2x2(b, Eigen::Vector2cd(0.0, 1.0).asDiagonal()));
    CHECK_THROWS_AS((void)similarity_witness(p, q), NotInNeighborhood);
  }
}

TEST_CASE("path conjugator") {
  auto b = scalarC();
  const Idempotent p0(from2x2(b, kDiag10));

  SUBCASE("constant path gives the identity") {
    std::vector<Idempotent> path{p0, p0, p0};
    CHECK(dist(path_conjugator(path), MatrixElement::identity(2, b)) < 1e-13);
  }
  SUBCASE("32-step rotation lifts to a conjugation") {
    std::vector<Idempotent> path;
    const int steps = 32;
    for (int i = 0; i <= steps; ++i) {
      const double t = static_cast<double>(i) / steps;  // angle up to 1 rad
      path.emplace_back(from2x2(b, rot(t) * kDiag10 * rot(t).adjoint()));
    }
    const MatrixElement g = path_conjugator(path);
    const MatrixElement lhs = g * p0.matrix() * inverse(g);
    CHECK(dist(lhs, path.back().matrix()) <= 1e-9);
  }
  SUBCASE("far jump fails at the offending step") {
    std::vector<Idempotent> path{
        p0, Idempotent(from2x2(b, Eigen::Vector2cd(0.0, 1.0).asDiagonal()))};
    CHECK_THROWS_AS((void)path_conjugator(path), NotInNeighborhood);
  }
  SUBCASE("closed loop commutes with the base point") {
    std::vector<Idempotent> path;
    const int steps = 16;
    for (int i = 0; i <= steps; ++i) {
      const double t = static_cast<double>(i) / steps;
      const double ang = 0.4 * std::sin(3.14159265358979 * t);
      path.emplace_back(from2x2(b, rot(ang) * kDiag10 * rot(ang).adjoint()));
    }
    const MatrixElement g = path_conjugator(path);
    CHECK(dist(g * p0.matrix(), p0.matrix() * g) <= 1e-9);
  }
}

TEST_CASE("corner inversion") {
  auto b = scalarC();
  const Idempotent p(from2x2(b, kDiag10));

  SUBCASE("corner unit inverts to itself") {
    CHECK(dist(corner_invert(p.matrix(), p), p.matrix()) < 1e-12);
  }
  SUBCASE("scalar corner arithmetic") {
    const MatrixElement a =
        from2x2(b, Eigen::Vector2cd(2.0, 0.0).asDiagonal());
    const MatrixElement ainv = corner_invert(a, p);
    CHECK(dist(ainv, from2x2(b, Eigen::Vector2cd(0.5, 0.0).asDiagonal())) <
          1e-12);
  }
  SUBCASE("zero is not invertible in the corner") {
    CHECK_THROWS_AS((void)corner_invert(MatrixElement::zero(2, b), p),
                    NotInvertibleInCorner);
  }
  SUBCASE("double inversion is the identity, also over the torus") {
    auto tb = torus2();
    Rng rng(41);
    const Idempotent tp(MatrixElement::identity(2, tb));  // free corner
    for (int t = 0; t < 3; ++t) {
      const MatrixElement r = random_matrix(tb, 2, 2, 0.05, rng);
      const MatrixElement a = tp.matrix() + corner_project(r, tp);
      const MatrixElement ai = corner_invert(a, tp);
      CHECK(dist(corner_invert(ai, tp), a) <= 1e-9);
    }
  }
}

TEST_CASE("iso pair normalization") {
  auto b = scalarC();
  const Idempotent p(from2x2(b, kDiag10));

  SUBCASE("trivial pair") {
    auto [x, y] = normalize_iso_pair(p.matrix(), p.matrix(), p, p);
    CHECK(dist(x, p.matrix()) < 1e-13);
    CHECK(dist(y, p.matrix()) < 1e-13);
  }
  SUBCASE("pair from a conjugation") {
    Rng rng(43);
    Eigen::Matrix2cd gm;
    gm << Complex(1.1, 0.2), Complex(0.3, -0.1), Complex(-0.2, 0.05),
        Complex(0.9, 0.0);
    const Eigen::Matrix2cd qm = gm * kDiag10 * gm.inverse();
    const Idempotent q = retract_idempotent(from2x2(b, qm));
    const MatrixElement x = from2x2(b, gm) * p.matrix();
    const MatrixElement y = from2x2(b, gm.inverse());
    auto [xn, yn] = normalize_iso_pair(x, y, p, q);
    CHECK(norm(xn * yn - q.matrix()) <= 1e-12);
    CHECK(norm(yn * xn - p.matrix()) <= 1e-12);
    // corner constraints
    CHECK(dist(q.matrix() * xn, xn) < 1e-12);
    CHECK(dist(xn * p.matrix(), xn) < 1e-12);
  }
  SUBCASE("a visibly broken pair is rejected") {
    const MatrixElement x =
        p.matrix() + Complex(0.01, 0.0) * MatrixElement::identity(2, b);
    CHECK_THROWS_AS((void)normalize_iso_pair(x, x, p, p), NotAnIsoPair);
  }
}

TEST_CASE("stabilized conjugator") {
  auto b = scalarC();

  SUBCASE("rank-one scalar case by hand") {
    const Idempotent one(MatrixElement::identity(1, b));
    const StabilizedConjugator sc = stabilize_conjugator(
        one.matrix(), one.matrix(), one, one);
    // alpha = beta = [[0,1],[1,0]], z = identity
    MatrixElement swap(2, b);
    swap.set(0, 1, c1(b, 1.0));
    swap.set(1, 0, c1(b, 1.0));
    CHECK(dist(sc.alpha, swap) < 1e-14);
    CHECK(dist(sc.beta, swap) < 1e-14);
    CHECK(dist(sc.z, MatrixElement::identity(2, b)) < 1e-14);
  }
  SUBCASE("rotation pipeline: involutions and conjugation") {
    const Idempotent p(from2x2(b, kDiag10));
    const Eigen::Matrix2cd g = rot(0.3);
    const Idempotent q(from2x2(b, g * kDiag10 * g.adjoint()));
    const MatrixElement x0 = from2x2(b, g) * p.matrix();
    const MatrixElement y0 = from2x2(b, g.adjoint());
    auto [x, y] = normalize_iso_pair(x0, y0, p, q);
    const StabilizedConjugator sc = stabilize_conjugator(x, y, p, q);
    CHECK(sc.alpha_involution_residual <= 1e-12);
    CHECK(sc.beta_involution_residual <= 1e-12);
    CHECK(sc.conjugation_residual <= 1e-12);
  }
  SUBCASE("an unnormalized pair is rejected") {
    const Idempotent p(from2x2(b, kDiag10));
    const MatrixElement x =
        p.matrix() + Complex(1e-4, 0.0) * MatrixElement::identity(2, b);
    CHECK_THROWS_AS((void)stabilize_conjugator(x, x, p, p), NotAnIsoPair);
  }
}

TEST_CASE("embed_tilde interacts correctly with corners") {
  auto tb = torus2(3, 16);
  Rng rng(47);
  const MatrixElement x = random_matrix(tb, 2, 1, 0.5, rng);
  const MatrixElement y = random_matrix(tb, 2, 1, 0.5, rng);
  // nonunital ring homomorphism
  CHECK(dist(embed_tilde(x, 4) * embed_tilde(y, 4), embed_tilde(x * y, 4)) <
        1e-13);
  CHECK(dist(embed_tilde(x, 4) + embed_tilde(y, 4), embed_tilde(x + y, 4)) <
        1e-14);
  // section-retraction
  CHECK(dist(top_left(embed_tilde(x, 5), 2), x) == 0.0);
}
