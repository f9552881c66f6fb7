#include "projmod/io.hpp"

#include <fstream>

namespace projmod {

Json to_json(const BackendConfig& cfg) {
  return Json{{"kind", to_string(cfg.kind)},     {"dim", cfg.dim},
              {"theta", cfg.theta},              {"degree", cfg.degree},
              {"max_degree", cfg.max_degree},    {"tol", cfg.tol}};
}

BackendPtr backend_from_json(const Json& j) {
  BackendConfig cfg;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "torus")
    cfg.kind = BackendKind::Torus;
  else if (kind == "nctorus")
    cfg.kind = BackendKind::NCTorus;
  else if (kind == "matrix")
    cfg.kind = BackendKind::Matrix;
  else
    throw Error("unknown backend kind: " + kind);
  cfg.dim = j.at("dim").get<int>();
  cfg.theta = j.value("theta", 0.0);
  cfg.degree = j.value("degree", 1);
  cfg.max_degree = j.value("max_degree", 2 * cfg.degree);
  cfg.tol = j.value("tol", 1e-9);
  return make_backend(cfg);
}

Json to_json(const AlgebraElement& a) {
  Json j;
  j["backend"] = to_json(*a.backend());
  if (a.backend()->kind == BackendKind::Matrix) {
    Json rows = Json::array();
    const auto& m = a.matrix();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      Json row = Json::array();
      for (Eigen::Index k = 0; k < m.cols(); ++k)
        row.push_back(Json{{"re", m(i, k).real()}, {"im", m(i, k).imag()}});
      rows.push_back(std::move(row));
    }
    j["entries"] = std::move(rows);
  } else {
    Json coeffs = Json::array();
    for (const auto& [k, c] : a.coeff_items())
      coeffs.push_back(Json{{"k", k}, {"re", c.real()}, {"im", c.imag()}});
    j["coeffs"] = std::move(coeffs);
  }
  return j;
}

AlgebraElement element_from_json(const Json& j) {
  const BackendPtr backend = backend_from_json(j.at("backend"));
  if (backend->kind == BackendKind::Matrix) {
    const Json& rows = j.at("entries");
    Eigen::MatrixXcd m(backend->dim, backend->dim);
    for (int i = 0; i < backend->dim; ++i)
      for (int k = 0; k < backend->dim; ++k)
        m(i, k) = Complex(rows.at(i).at(k).at("re").get<double>(),
                          rows.at(i).at(k).at("im").get<double>());
    return AlgebraElement::from_matrix(backend, std::move(m));
  }
  std::vector<std::pair<std::vector<int>, Complex>> coeffs;
  for (const Json& item : j.at("coeffs"))
    coeffs.emplace_back(
        item.at("k").get<std::vector<int>>(),
        Complex(item.at("re").get<double>(), item.at("im").get<double>()));
  return AlgebraElement::from_coeffs(backend, coeffs);
}

Json to_json(const MatrixElement& x) {
  Json rows = Json::array();
  for (int i = 0; i < x.n(); ++i) {
    Json row = Json::array();
    for (int j2 = 0; j2 < x.n(); ++j2) row.push_back(to_json(x.at(i, j2)));
    rows.push_back(std::move(row));
  }
  return Json{{"n", x.n()}, {"entries", std::move(rows)}};
}

MatrixElement matrix_from_json(const Json& j) {
  const int n = j.at("n").get<int>();
  if (n < 1) throw BadDimension("matrix size must be positive");
  const Json& rows = j.at("entries");
  AlgebraElement first = element_from_json(rows.at(0).at(0));
  MatrixElement x(n, first.backend());
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      x.set(i, k, element_from_json(rows.at(i).at(k)));
  return x;
}

Json to_json(const Idempotent& p) {
  Json j = to_json(p.matrix());
  j["residual"] = p.residual();
  return j;
}

Idempotent idempotent_from_json(const Json& j) {
  return Idempotent(matrix_from_json(j));
}

Json module_to_json(const ProjectiveModule& E) {
  return Json{{"n", E.n()},
              {"p", to_json(E.idem())},
              {"backend", to_json(*E.backend())}};
}

ModulePtr module_from_json(const Json& j) {
  return make_module(idempotent_from_json(j.at("p")));
}

Json to_json(const ModuleVector& s) {
  Json v = Json::array();
  for (const auto& e : s.entries()) v.push_back(to_json(e));
  return Json{{"v", std::move(v)}};
}

ModuleVector vector_from_json(const ModulePtr& E, const Json& j) {
  std::vector<AlgebraElement> v;
  for (const Json& item : j.at("v")) v.push_back(element_from_json(item));
  return ModuleVector(E, std::move(v));
}

Json connection_to_json(const Connection& c) {
  Json alpha = Json::object();
  for (int j = 0; j < c.basis_size(); ++j)
    alpha["D" + std::to_string(j + 1)] = to_json(c.alpha(j));
  return Json{{"module", module_to_json(*c.module())},
              {"alpha", std::move(alpha)}};
}

Connection connection_from_json(const Json& j) {
  ModulePtr E = module_from_json(j.at("module"));
  const BasisPtr basis = standard_torus_basis(E->backend());
  std::vector<MatrixElement> alpha;
  for (std::size_t k = 0; k < basis->elements.size(); ++k) {
    const std::string key = "D" + std::to_string(k + 1);
    if (j.at("alpha").contains(key))
      alpha.push_back(matrix_from_json(j.at("alpha").at(key)));
    else
      alpha.push_back(MatrixElement::zero(E->n(), E->backend()));
  }
  return Connection(E, basis, std::move(alpha));
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  Json j;
  in >> j;
  return j;
}

void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace projmod
