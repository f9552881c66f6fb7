#pragma once

#include <span>

#include "projmod/matrix_ring.hpp"

namespace projmod {

struct IdempotentCheck {
  bool ok = false;
  double residual = 0.0;  // ||p^2 - p||
};

/// Reports ||p^2 - p|| and whether it is within the backend tolerance.
IdempotentCheck is_idempotent(const MatrixElement& p);

/// A matrix idempotent, validated at construction: ||p^2 - p|| <= tol.
class Idempotent {
 public:
  explicit Idempotent(MatrixElement p);

  const MatrixElement& matrix() const { return p_; }
  double residual() const { return residual_; }
  int n() const { return p_.n(); }
  const BackendPtr& backend() const { return p_.backend(); }
  /// 1 - p.
  MatrixElement complement() const;

 private:
  MatrixElement p_;
  double residual_;
};

/// Cubic retraction p <- 3p^2 - 2p^3 from a near-idempotent seed
/// (basin: residual < 1/4) down to the target residual, stalling out at
/// the rounding floor. The result must reach 1e-12 regardless of target.
/// Throws NoConvergence if the residual stalls above it or the seed is
/// too far.
Idempotent retract_idempotent(const MatrixElement& p0, double target = 1e-12);

/// Invertible s with s q s^{-1} = p, from s = pq + (1-p)(1-q).
struct SimilarityWitness {
  MatrixElement s;
  MatrixElement s_inv;
  Idempotent source;  // q
  Idempotent target;  // p
  double residual;    // ||s q s^{-1} - p||
};

/// Witness conjugating q into p. Throws NotInNeighborhood when s is not
/// invertible (or numerically near-singular), i.e. q lies outside U_p.
SimilarityWitness similarity_witness(const Idempotent& p, const Idempotent& q);

/// Composes stepwise witnesses along a discrete path of idempotents into
/// one conjugator g with g path[0] g^{-1} = path[last], residual growing
/// at most linearly in the number of steps.
MatrixElement path_conjugator(std::span<const Idempotent> path);

/// Inverse of a in the corner algebra pM_n(A)p with unit p, via the
/// padded inverse of a + 1 - p. Throws NotInvertibleInCorner.
MatrixElement corner_invert(const MatrixElement& a, const Idempotent& p);

/// p x p.
MatrixElement corner_project(const MatrixElement& x, const Idempotent& p);

/// Given x, y with xy = q and yx = p up to a loose tolerance (1e-6),
/// produces the corner-constrained pair x' = qxp, y' = pyq, polished so
/// that x'y' = q and y'x' = p hold to the backend tolerance.
/// Throws NotAnIsoPair.
std::pair<MatrixElement, MatrixElement> normalize_iso_pair(
    const MatrixElement& x, const MatrixElement& y, const Idempotent& p,
    const Idempotent& q);

/// The doubled-size conjugator of the stabilization trick: involutions
/// alpha = [[1-q, x], [y, 1-p]] and beta = [[1-p, p], [p, 1-p]] with
/// z = beta alpha satisfying z qtilde z^{-1} = ptilde (and z^{-1} = alpha beta).
struct StabilizedConjugator {
  MatrixElement alpha;
  MatrixElement beta;
  MatrixElement z;
  double alpha_involution_residual;  // ||alpha^2 - 1||
  double beta_involution_residual;   // ||beta^2 - 1||
  double conjugation_residual;       // ||z qtilde z^{-1} - ptilde||
};

/// Requires a normalized iso pair (see normalize_iso_pair); throws
/// NotAnIsoPair otherwise.
StabilizedConjugator stabilize_conjugator(const MatrixElement& x,
                                          const MatrixElement& y,
                                          const Idempotent& p,
                                          const Idempotent& q);

}  // namespace projmod
