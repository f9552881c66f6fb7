#pragma once

#include <stdexcept>
#include <string>

namespace projmod {

/// Base class of every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two operands live over different backends.
struct BackendMismatch : Error {
  using Error::Error;
};

/// A product (or derived quantity) exceeded the hard Fourier band cap.
struct DegreeOverflow : Error {
  using Error::Error;
};

/// Inversion failed: grid minimum modulus below tolerance, or the
/// iteration residual stalled above tolerance.
struct NotInvertible : Error {
  using Error::Error;
};

/// An iteration did not reach its target residual within the cap.
struct NoConvergence : Error {
  using Error::Error;
};

/// The similarity witness s = pq + (1-p)(1-q) is not invertible,
/// i.e. q lies outside the neighborhood U_p.
struct NotInNeighborhood : Error {
  using Error::Error;
};

/// The padded element a + 1 - p is not invertible, so a has no inverse
/// in the corner algebra pM_n(A)p.
struct NotInvertibleInCorner : Error {
  using Error::Error;
};

/// A claimed isomorphism pair (x, y) fails xy = q, yx = p after
/// normalization.
struct NotAnIsoPair : Error {
  using Error::Error;
};

/// Incompatible matrix/module dimensions.
struct BadDimension : Error {
  using Error::Error;
};

/// A derivation is not expressible over the declared basis.
struct UnknownDerivation : Error {
  using Error::Error;
};

}  // namespace projmod
