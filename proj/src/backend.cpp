#include "projmod/backend.hpp"

namespace projmod {

BackendPtr make_backend(BackendConfig cfg) {
  if (cfg.dim < 1) throw BadDimension("backend dim must be positive");
  if (cfg.tol <= 0.0) throw Error("backend tol must be positive");
  switch (cfg.kind) {
    case BackendKind::Torus:
    case BackendKind::NCTorus:
      if (cfg.dim > 4)
        throw BadDimension("torus backends support dim <= 4");
      if (cfg.kind == BackendKind::NCTorus && cfg.dim != 2)
        throw BadDimension("nctorus requires dim = 2");
      if (cfg.degree < 1) throw Error("degree must be positive");
      if (cfg.max_degree < 2 * cfg.degree)
        throw Error("max_degree must be at least 2*degree");
      if (cfg.kind == BackendKind::Torus) cfg.theta = 0.0;
      break;
    case BackendKind::Matrix:
      cfg.theta = 0.0;
      cfg.degree = 0;
      cfg.max_degree = 0;
      break;
  }
  return std::make_shared<const BackendConfig>(cfg);
}

BackendPtr make_torus(int dim, int degree, int max_degree, double tol) {
  return make_backend({BackendKind::Torus, dim, 0.0, degree, max_degree, tol});
}

BackendPtr make_nctorus(double theta, int degree, int max_degree, double tol) {
  return make_backend(
      {BackendKind::NCTorus, 2, theta, degree, max_degree, tol});
}

BackendPtr make_matrix_backend(int dim, double tol) {
  return make_backend({BackendKind::Matrix, dim, 0.0, 0, 0, tol});
}

void require_same_backend(const BackendPtr& a, const BackendPtr& b) {
  if (!same_backend(a, b)) throw BackendMismatch("operands over different backends");
}

std::string to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::Torus: return "torus";
    case BackendKind::NCTorus: return "nctorus";
    case BackendKind::Matrix: return "matrix";
  }
  return "?";
}

}  // namespace projmod
