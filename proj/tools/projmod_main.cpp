// projmod: command-line front end for the projective-module toolkit.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "projmod/scenarios.hpp"

namespace pm = projmod;

namespace {

struct GlobalOpts {
  std::string backend = "torus";
  int dim = 2;
  double theta = 0.6180339887;
  int degree = 8;
  int max_degree = 64;
  double tol = 1e-9;
  std::uint64_t seed = 0;
  bool json = false;
  bool timing = false;
};

pm::BackendPtr make_backend_from(const GlobalOpts& g) {
  if (g.backend == "torus")
    return pm::make_torus(g.dim, g.degree, g.max_degree, g.tol);
  if (g.backend == "nctorus")
    return pm::make_nctorus(g.theta, g.degree, g.max_degree, g.tol);
  if (g.backend == "matrix") return pm::make_matrix_backend(g.dim, g.tol);
  throw pm::Error("unknown backend: " + g.backend);
}

std::vector<Eigen::VectorXd> parse_translations(const std::string& text) {
  std::vector<Eigen::VectorXd> out;
  std::stringstream groups(text);
  std::string group;
  while (std::getline(groups, group, ';')) {
    if (group.empty()) continue;
    std::vector<double> comps;
    std::stringstream items(group);
    std::string item;
    while (std::getline(items, item, ',')) comps.push_back(std::stod(item));
    Eigen::VectorXd v(comps.size());
    for (std::size_t i = 0; i < comps.size(); ++i) v[i] = comps[i];
    out.push_back(std::move(v));
  }
  if (out.empty()) throw pm::Error("no translations given");
  return out;
}

void emit(const pm::Json& j, const std::string& out_path) {
  if (out_path.empty())
    std::cout << j.dump(2) << "\n";
  else
    pm::save_json_file(out_path, j);
}

pm::Json report_json(const std::string& test, int samples,
                     double max_residual, double tol) {
  return pm::Json{{"test", test},
                  {"samples", samples},
                  {"max_residual", max_residual},
                  {"pass", max_residual <= tol}};
}

int run(int argc, char** argv) {
  CLI::App app{"numerical toolkit for projective modules over band-limited "
               "function algebras"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand name

  GlobalOpts g;
  app.add_option("--backend", g.backend,
                 "backend kind: torus | nctorus | matrix");
  app.add_option("--dim", g.dim, "torus dimensions or matrix size");
  app.add_option("--theta", g.theta, "deformation parameter (nctorus)");
  app.add_option("--degree", g.degree, "retained Fourier band");
  app.add_option("--max-degree", g.max_degree, "hard degree cap");
  app.add_option("--tol", g.tol, "residual tolerance");
  app.add_option("--seed", g.seed, "random seed");
  app.add_flag("--json", g.json, "machine-readable output");
  app.add_flag("--timing", g.timing, "include wall-clock times in reports");

  std::string in_path, in2_path, out_path, module_path, conn_path;
  std::string translations = "0.05,0;0,0.07;0.03,0.04";
  int samples = 20;
  int winding = 1;
  int idx_i = 0, idx_j = 1;

  // ---- bott ----------------------------------------------------------
  auto* bott = app.add_subcommand(
      "bott", "generate the winding idempotent over the 2-torus");
  bott->add_option("--winding", winding, "winding number (0 = trivial)");
  bott->add_option("--out", out_path, "output idempotent file");
  bott->callback([&] {
    auto b = pm::make_torus(2, g.degree, g.max_degree, g.tol);
    const pm::Idempotent p = pm::gen_bott(b, winding, g.degree);
    pm::Json j = pm::to_json(p);
    j["chern"] = pm::chern_number(p);
    emit(j, out_path);
  });

  // ---- module --------------------------------------------------------
  auto* module_cmd = app.add_subcommand(
      "module", "wrap an idempotent file as a module file");
  module_cmd->add_option("--in", in_path, "idempotent file")->required();
  module_cmd->add_option("--out", out_path, "module file");
  module_cmd->callback([&] {
    const pm::Idempotent p =
        pm::idempotent_from_json(pm::load_json_file(in_path));
    emit(pm::module_to_json(*pm::make_module(p)), out_path);
  });

  // ---- idem ----------------------------------------------------------
  auto* idem = app.add_subcommand("idem", "idempotent geometry");
  idem->require_subcommand(1);

  auto* idem_check = idem->add_subcommand("check", "report ||p^2 - p||");
  idem_check->add_option("--in", in_path, "matrix file")->required();
  idem_check->callback([&] {
    const pm::MatrixElement x =
        pm::matrix_from_json(pm::load_json_file(in_path));
    const auto chk = pm::is_idempotent(x);
    emit(pm::Json{{"residual", chk.residual}, {"pass", chk.ok}}, out_path);
    if (!chk.ok) throw CLI::RuntimeError(1);
  });

  auto* idem_retract = idem->add_subcommand("retract", "cubic retraction");
  idem_retract->add_option("--in", in_path, "matrix file")->required();
  idem_retract->add_option("--out", out_path, "output idempotent file");
  idem_retract->callback([&] {
    const pm::MatrixElement x =
        pm::matrix_from_json(pm::load_json_file(in_path));
    emit(pm::to_json(pm::retract_idempotent(x)), out_path);
  });

  auto* idem_similar =
      idem->add_subcommand("similar", "similarity witness conjugating q to p");
  idem_similar->add_option("--in", in_path, "idempotent p file")->required();
  idem_similar->add_option("--in2", in2_path, "idempotent q file")->required();
  idem_similar->add_option("--out", out_path, "witness matrix output");
  idem_similar->callback([&] {
    const pm::Idempotent p =
        pm::idempotent_from_json(pm::load_json_file(in_path));
    const pm::Idempotent q =
        pm::idempotent_from_json(pm::load_json_file(in2_path));
    const pm::SimilarityWitness w = pm::similarity_witness(p, q);
    pm::Json j = pm::to_json(w.s);
    j["residual"] = w.residual;
    emit(j, out_path);
  });

  std::vector<std::string> path_files;
  auto* idem_path =
      idem->add_subcommand("path", "compose witnesses along a path");
  idem_path->add_option("--in", path_files, "idempotent files, path order")
      ->required()
      ->expected(-2);
  idem_path->add_option("--out", out_path, "conjugator matrix output");
  idem_path->callback([&] {
    std::vector<pm::Idempotent> path;
    for (const auto& f : path_files)
      path.push_back(pm::idempotent_from_json(pm::load_json_file(f)));
    emit(pm::to_json(pm::path_conjugator(path)), out_path);
  });

  // ---- conn ----------------------------------------------------------
  auto* conn = app.add_subcommand("conn", "connections and covariant data");
  conn->require_subcommand(1);

  auto* conn_levi = conn->add_subcommand(
      "levi", "canonical connection of a presented module");
  conn_levi->add_option("--module", module_path, "module file")->required();
  conn_levi->add_option("--out", out_path, "connection file");
  conn_levi->callback([&] {
    pm::ModulePtr E = pm::module_from_json(pm::load_json_file(module_path));
    const pm::Connection c = pm::Connection::levi_civita(
        E, pm::standard_torus_basis(E->backend()));
    emit(pm::connection_to_json(c), out_path);
  });

  auto* conn_gauge = conn->add_subcommand("gauge", "gauge-transform a connection");
  conn_gauge->add_option("--conn", conn_path, "connection file")->required();
  conn_gauge->add_option("--in", in_path, "gauge matrix file")->required();
  conn_gauge->add_option("--out", out_path, "transformed connection file");
  conn_gauge->callback([&] {
    const pm::Connection c =
        pm::connection_from_json(pm::load_json_file(conn_path));
    const pm::MatrixElement gm =
        pm::matrix_from_json(pm::load_json_file(in_path));
    const pm::ModuleHom gh(c.module(), c.module(), gm);
    emit(pm::connection_to_json(pm::gauge_transform(c, gh)), out_path);
  });

  auto* conn_covcoord = conn->add_subcommand(
      "covcoord", "covariant-coordinate commutator report");
  conn_covcoord->add_option("--conn", conn_path, "connection file");
  conn_covcoord->add_option("--samples", samples, "sample count");
  conn_covcoord->callback([&] {
    pm::Connection c = [&] {
      if (!conn_path.empty())
        return pm::connection_from_json(pm::load_json_file(conn_path));
      auto b = make_backend_from(g);
      return pm::Connection::levi_civita(pm::make_free_module(1, b),
                                         pm::standard_torus_basis(b));
    }();
    pm::Rng rng(g.seed);
    const auto& b = c.module()->backend();
    std::vector<pm::AlgebraElement> gens;
    if (b->kind != pm::BackendKind::Matrix) {
      gens = {pm::AlgebraElement::monomial(b, std::vector<int>{1, 0}),
              pm::AlgebraElement::monomial(b, std::vector<int>{0, 1}),
              pm::AlgebraElement::monomial(b, std::vector<int>{-1, 0}),
              pm::AlgebraElement::monomial(b, std::vector<int>{0, -1})};
    } else {
      for (int t = 0; t < 3; ++t)
        gens.push_back(pm::random_element(b, 0, 1.0, rng));
    }
    double worst = 0.0;
    for (const auto& a : gens)
      worst = std::max(
          worst, pm::covariant_coordinate(a, c, gens, rng, samples / 4 + 1)
                     .max_commutator);
    emit(report_json("covariant-coordinate-commutators",
                     static_cast<int>(gens.size()), worst, g.tol),
         out_path);
    if (worst > g.tol) throw CLI::RuntimeError(1);
  });

  auto* conn_dend = conn->add_subcommand(
      "dend", "derivative-endomorphism check of a matrix/derivation pair");
  conn_dend->add_option("--module", module_path, "module file")->required();
  conn_dend->add_option("--in", in_path, "matrix part file")->required();
  int dend_basis = 0;
  conn_dend->add_option("--basis-derivation", dend_basis,
                        "basis derivation index");
  conn_dend->callback([&] {
    pm::ModulePtr E = pm::module_from_json(pm::load_json_file(module_path));
    const pm::MatrixElement mat =
        pm::matrix_from_json(pm::load_json_file(in_path));
    const pm::DerivativeEndomorphism phi{
        mat, pm::Derivation::basis(E->backend(), dend_basis)};
    pm::Rng rng(g.seed);
    std::vector<pm::AlgebraElement> gens{
        pm::AlgebraElement::monomial(E->backend(), std::vector<int>{1, 0}),
        pm::AlgebraElement::monomial(E->backend(), std::vector<int>{0, 1})};
    const auto rep = pm::dend_check(phi, E, gens, rng);
    emit(pm::Json{{"test", "derivative-endomorphism"},
                  {"relation_residual", rep.relation_residual},
                  {"membership_residual", rep.membership_residual},
                  {"pass", rep.pass}},
         out_path);
    if (!rep.pass) throw CLI::RuntimeError(1);
  });

  auto* conn_curv = conn->add_subcommand("curv", "curvature report");
  conn_curv->add_option("--conn", conn_path, "connection file")->required();
  conn_curv->add_option("--i", idx_i, "first basis index");
  conn_curv->add_option("--j", idx_j, "second basis index");
  conn_curv->add_option("--out", out_path, "output file");
  conn_curv->callback([&] {
    const pm::Connection c =
        pm::connection_from_json(pm::load_json_file(conn_path));
    pm::Rng rng(g.seed);
    const auto rep = pm::curvature(c, idx_i, idx_j, rng);
    pm::Json j = pm::to_json(rep.value);
    j["a_linearity_residual"] = rep.a_linearity_residual;
    emit(j, out_path);
  });

  // ---- ext -----------------------------------------------------------
  auto* ext = app.add_subcommand("ext", "extension cocycles and brackets");
  ext->require_subcommand(1);
  ext->add_option("--module", module_path, "module file (omit for the winding module)");
  ext->add_option("--translations", translations,
                  "semicolon-separated translation vectors");
  ext->add_option("--samples", samples, "sample count");

  const auto load_module = [&]() -> pm::ModulePtr {
    if (!module_path.empty())
      return pm::module_from_json(pm::load_json_file(module_path));
    auto b = pm::make_torus(2, g.degree, g.max_degree, g.tol);
    return pm::make_module(pm::gen_bott(b, 1, g.degree));
  };
  const auto group_elements = [&](const pm::BackendPtr& b) {
    std::vector<pm::GroupElement> gs;
    for (const auto& v : parse_translations(translations))
      gs.push_back(pm::Automorphism::translation(b, v));
    return gs;
  };

  auto* ext_cocycle =
      ext->add_subcommand("cocycle", "cocycle values and normalization");
  ext_cocycle->callback([&] {
    pm::ModulePtr E = load_module();
    pm::LiftCache cache(E);
    const auto gs = group_elements(E->backend());
    double worst = 0.0;
    const pm::GroupElement id = pm::Automorphism::identity(E->backend());
    for (const auto& gel : gs) {
      worst = std::max(worst,
                       pm::norm(pm::cocycle_omega(cache, gel, id) - E->p()));
      worst = std::max(worst,
                       pm::norm(pm::cocycle_omega(cache, id, gel) - E->p()));
    }
    emit(report_json("cocycle-normalization",
                     static_cast<int>(2 * gs.size()), worst, 1e-14),
         out_path);
    if (worst > 1e-14) throw CLI::RuntimeError(1);
  });

  auto* ext_assoc =
      ext->add_subcommand("assoc", "associativity of the extension product");
  ext_assoc->callback([&] {
    pm::ModulePtr E = load_module();
    pm::LiftCache cache(E);
    const auto gs = group_elements(E->backend());
    pm::Rng rng(g.seed);
    std::vector<pm::ExtensionPair> els;
    for (const auto& gel : gs)
      els.push_back(
          {E->p() + pm::corner_project(
                        pm::random_matrix(E->backend(), E->n(), 1, 0.1, rng),
                        E->idem()),
           gel});
    double worst = 0.0;
    for (const auto& a : els)
      for (const auto& b2 : els)
        for (const auto& c : els) {
          const auto lhs = pm::extension_multiply(
              cache, pm::extension_multiply(cache, a, b2), c);
          const auto rhs = pm::extension_multiply(
              cache, a, pm::extension_multiply(cache, b2, c));
          worst = std::max(worst, pm::norm(lhs.n - rhs.n));
        }
    emit(report_json("extension-associativity",
                     static_cast<int>(els.size() * els.size() * els.size()),
                     worst, 1e-8),
         out_path);
    if (worst > 1e-8) throw CLI::RuntimeError(1);
  });

  auto* ext_crossed =
      ext->add_subcommand("crossed", "crossed-homomorphism multiplier law");
  ext_crossed->callback([&] {
    auto b = make_backend_from(g);
    pm::Rng rng(g.seed);
    const auto vs = parse_translations(translations);
    double worst = 0.0;
    for (int t = 0; t < samples; ++t) {
      const pm::Automorphism psi =
          pm::Automorphism::translation(b, vs[t % vs.size()]);
      const pm::AlgebraElement a =
          pm::AlgebraElement::unit(b) + pm::random_element(b, 2, 0.25, rng);
      const pm::AlgebraElement c =
          pm::AlgebraElement::unit(b) + pm::random_element(b, 2, 0.25, rng);
      const pm::AlgebraElement lhs = pm::crossed_hom(psi, a * c);
      const pm::AlgebraElement rhs = a * pm::crossed_hom(psi, c) *
                                     pm::inverse(a) * pm::crossed_hom(psi, a);
      worst = std::max(worst, pm::norm(lhs - rhs));
    }
    emit(report_json("crossed-multiplier-law", samples, worst, 1e-10),
         out_path);
    if (worst > 1e-10) throw CLI::RuntimeError(1);
  });

  auto* ext_bracket = ext->add_subcommand(
      "bracket", "extension bracket against the operator commutator");
  ext_bracket->callback([&] {
    pm::ModulePtr E = load_module();
    const auto basis = pm::standard_torus_basis(E->backend());
    const pm::BracketContext bc(E, basis);
    pm::Rng rng(g.seed);
    double worst = 0.0;
    for (int t = 0; t < samples; ++t) {
      const pm::ExtensionElement u{
          pm::corner_project(
              pm::random_matrix(E->backend(), E->n(), 1, 0.5, rng), E->idem()),
          rng.uniform() < 0.5 ? basis->elements[0] : basis->elements[1]};
      const pm::ExtensionElement v{
          pm::corner_project(
              pm::random_matrix(E->backend(), E->n(), 1, 0.5, rng), E->idem()),
          basis->elements[1]};
      const pm::ExtensionElement w = bc.bracket(u, v);
      const auto gu = pm::extension_operator(E, u);
      const auto gv = pm::extension_operator(E, v);
      const auto gw = pm::extension_operator(E, w);
      for (int i = 0; i < E->n(); ++i) {
        const pm::ModuleVector s = pm::generator(E, i);
        const pm::ModuleVector gvs(E, pm::dend_apply(gv, s));
        const pm::ModuleVector gus(E, pm::dend_apply(gu, s));
        const auto lhs1 = pm::dend_apply(gu, gvs);
        const auto lhs2 = pm::dend_apply(gv, gus);
        const auto rhs = pm::dend_apply(gw, s);
        for (int k = 0; k < E->n(); ++k)
          worst = std::max(worst, pm::norm(lhs1[k] - lhs2[k] - rhs[k]));
      }
    }
    emit(report_json("bracket-operator-match", samples, worst, 1e-8),
         out_path);
    if (worst > 1e-8) throw CLI::RuntimeError(1);
  });

  auto* ext_jacobi = ext->add_subcommand("jacobi", "bracket Jacobi identity");
  ext_jacobi->callback([&] {
    pm::ModulePtr E = load_module();
    const auto basis = pm::standard_torus_basis(E->backend());
    const pm::BracketContext bc(E, basis);
    pm::Rng rng(g.seed);
    double worst = 0.0;
    for (int t = 0; t < samples; ++t) {
      const auto rand_el = [&] {
        return pm::ExtensionElement{
            pm::corner_project(
                pm::random_matrix(E->backend(), E->n(), 1, 0.5, rng),
                E->idem()),
            rng.symmetric(1.0) * basis->elements[0] +
                rng.symmetric(1.0) * basis->elements[1]};
      };
      const auto u = rand_el(), v = rand_el(), w = rand_el();
      const auto j1 = bc.bracket(u, bc.bracket(v, w));
      const auto j2 = bc.bracket(v, bc.bracket(w, u));
      const auto j3 = bc.bracket(w, bc.bracket(u, v));
      worst = std::max(worst, pm::norm(j1.phi + j2.phi + j3.phi));
    }
    emit(report_json("bracket-jacobi", samples, worst, 1e-7), out_path);
    if (worst > 1e-7) throw CLI::RuntimeError(1);
  });

  // ---- scenario ------------------------------------------------------
  std::string scenario_name = "all";
  bool quick = false;
  auto* scen = app.add_subcommand("scenario", "run a verification scenario");
  scen->add_option("name", scenario_name,
                   "scenario name or 'all' (prop11, corner, stabilize, "
                   "lemma44, gauge, covcoord, cocycle, bracket, crossed, "
                   "oracle)");
  scen->add_flag("--quick", quick, "reduced sample counts");
  scen->add_option("--out", out_path, "write the JSON report here");
  scen->callback([&] {
    pm::ScenarioConfig cfg;
    cfg.seed = g.seed;
    cfg.band = g.degree;
    cfg.cap = g.max_degree;
    cfg.theta = g.theta;
    cfg.tol = g.tol;
    cfg.quick = quick;
    bool all_pass = true;
    pm::Json reports = pm::Json::array();
    const std::vector<std::string> names =
        scenario_name == "all" ? pm::scenario_names()
                               : std::vector<std::string>{scenario_name};
    for (const auto& name : names) {
      const pm::ScenarioReport rep = pm::run_scenario(name, cfg);
      all_pass = all_pass && rep.pass();
      reports.push_back(pm::to_json(rep, g.timing));
      if (!g.json) {
        std::cout << (rep.pass() ? "[PASS] " : "[FAIL] ") << name << "\n";
        for (const auto& r : rep.records)
          std::printf("    %-36s max %.3e  tol %.0e  [%s]\n", r.name.c_str(),
                      r.max_residual, r.tolerance, r.pass ? "ok" : "FAIL");
      }
    }
    const pm::Json out =
        reports.size() == 1 ? reports[0] : pm::Json{{"reports", reports}};
    if (g.json || !out_path.empty()) emit(out, out_path);
    if (!all_pass) throw CLI::RuntimeError(1);
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const pm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
