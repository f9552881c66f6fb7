#include "projmod/random.hpp"

#include <array>

namespace projmod {

AlgebraElement random_element(const BackendPtr& backend, int band,
                              double magnitude, Rng& rng) {
  if (backend->kind == BackendKind::Matrix) {
    const int d = backend->dim;
    Eigen::MatrixXcd m(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) m(i, j) = rng.disk(1.0);
    const double s = m.operatorNorm();
    if (s > 0.0) m *= magnitude / s;
    return AlgebraElement::from_matrix(backend, std::move(m));
  }
  const int dim = backend->dim;
  const int width = 2 * band + 1;
  std::int64_t modes = 1;
  for (int j = 0; j < dim; ++j) modes *= width;
  std::vector<std::pair<std::vector<int>, Complex>> coeffs;
  coeffs.reserve(modes);
  std::array<int, 4> k{};
  for (std::int64_t m = 0; m < modes; ++m) {
    std::int64_t rem = m;
    for (int j = dim - 1; j >= 0; --j) {
      k[j] = static_cast<int>(rem % width) - band;
      rem /= width;
    }
    coeffs.emplace_back(std::vector<int>(k.begin(), k.begin() + dim),
                        rng.disk(1.0));
  }
  AlgebraElement a = AlgebraElement::from_coeffs(backend, coeffs);
  const double s = norm(a);
  if (s > 0.0) a = Complex(magnitude / s, 0.0) * a;
  return a;
}

MatrixElement random_matrix(const BackendPtr& backend, int n, int band,
                            double magnitude, Rng& rng) {
  MatrixElement x(n, backend);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      x.set(i, j, random_element(backend, band, 1.0, rng));
  const double s = norm(x);
  if (s > 0.0) x = Complex(magnitude / s, 0.0) * x;
  return x;
}

}  // namespace projmod
