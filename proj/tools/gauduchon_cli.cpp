// Batch front end: JSON config in, JSON report out, optional binary field
// dumps and CSV plot slices.  One command per process; exit 0 on success or
// convergence, 2 on clean non-convergence, 1 on any error.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "gauduchon/field_io.hpp"
#include "gauduchon/random_field.hpp"
#include "gauduchon/solver.hpp"

using json = nlohmann::ordered_json;
using namespace gauduchon;

namespace {

constexpr const char* kVersion = "0.1.0";

[[noreturn]] void fail(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  std::exit(1);
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config " + path);
  try {
    return json::parse(in);  // parse errors carry line/byte positions
  } catch (const json::parse_error& e) {
    fail(std::string("config ") + path + ": " + e.what());
  }
}

void check_keys(const json& o, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!o.is_object()) fail("config: '" + where + "' must be an object");
  for (auto& [k, v] : o.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) fail("config: unknown key '" + k + "' in '" + where + "'");
  }
}

template <class T>
T get_or(const json& o, const char* key, T dflt) {
  return o.contains(key) ? o.at(key).get<T>() : dflt;
}

Eigen::MatrixXcd parse_matrix(const json& j, int n) {
  if (!j.is_array() || int(j.size()) != n)
    fail("config: metric.H must be an " + std::to_string(n) + "x" +
         std::to_string(n) + " array of [re, im] pairs");
  Eigen::MatrixXcd H(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const json& e = j.at(r).at(c);
      H(r, c) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
    }
  return H;
}

MetricSpec parse_metric_spec(const json& m, int n) {
  check_keys(m, "metric",
             {"kind", "H", "seed", "amplitude", "bandlimit",
              "gauduchon_normalize"});
  MetricSpec sp;
  std::string kind = get_or<std::string>(m, "kind", "constant");
  if (kind == "constant") sp.kind = MetricSpec::Constant;
  else if (kind == "conformal") sp.kind = MetricSpec::Conformal;
  else if (kind == "perturbed") sp.kind = MetricSpec::Perturbed;
  else fail("config: metric.kind must be constant|conformal|perturbed");
  sp.H = m.contains("H") ? parse_matrix(m.at("H"), n)
                         : Eigen::MatrixXcd::Identity(n, n);
  sp.seed = get_or<unsigned>(m, "seed", 1u);
  sp.amplitude = get_or<double>(m, "amplitude", 0.1);
  sp.bandlimit = get_or<int>(m, "bandlimit", 1);
  return sp;
}

struct Artifacts {
  std::string report_path, dump_dir;
  json report;

  void dump(const std::string& name, const FormField& F) const {
    if (dump_dir.empty()) return;
    std::filesystem::create_directories(dump_dir);
    write_field_dump(dump_dir + "/" + name + ".bin", F);
  }

  void csv_slice(const json& spec, const FormField& F) const {
    if (dump_dir.empty()) return;
    const TorusGrid& g = F.grid();
    check_keys(spec, "outputs.csv_slice", {"field", "fixed"});
    std::vector<int> fixed = spec.at("fixed").get<std::vector<int>>();
    if (int(fixed.size()) != g.axes() - 2)
      fail("config: outputs.csv_slice.fixed needs " +
           std::to_string(g.axes() - 2) + " axis indices");
    std::ofstream out(dump_dir + "/" +
                      get_or<std::string>(spec, "field", "slice") + ".csv");
    out << "x1,y1,re,im\n";
    for (int i = 0; i < g.N; ++i)
      for (int j = 0; j < g.N; ++j) {
        long x = 0;
        std::array<int, 16> idx{};
        idx[0] = i;
        idx[1] = j;
        for (int a = 2; a < g.axes(); ++a) idx[a] = fixed[a - 2];
        for (int a = 0; a < g.axes(); ++a) x = x * g.N + idx[a];
        out << i << "," << j << "," << F.at(0, x).real() << ","
            << F.at(0, x).imag() << "\n";
      }
  }

  int finish(int code) {
    report["exit_code"] = code;
    if (report_path.empty()) {
      std::cout << report.dump(2) << "\n";
    } else {
      auto parent = std::filesystem::path(report_path).parent_path();
      if (!parent.empty()) std::filesystem::create_directories(parent);
      std::ofstream out(report_path);
      out << report.dump(2) << "\n";
      if (!out) fail("cannot write report " + report_path);
    }
    return code;
  }
};

// ------------------------------------------------------------------ selftest

struct Check {
  std::string name;
  double residual, threshold;
};

int run_selftest(const std::string& which, Artifacts& art, bool verbose) {
  std::vector<Check> checks;
  auto add = [&](const std::string& name, double r, double thr) {
    checks.push_back({name, r, thr});
    if (verbose)
      std::cerr << name << ": " << r << " (threshold " << thr << ")\n";
  };

  if (which == "algebra") {
    auto rand_cplx = [](std::mt19937& g) {
      std::normal_distribution<double> d(0.0, 1.0);
      return cplx(d(g), d(g));
    };
    for (int n : {2, 3}) {
      std::mt19937 rs(17 + n);
      Eigen::MatrixXcd A(n, n);
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) A(j, k) = rand_cplx(rs);
      MetricPoint w(0.3 * Eigen::MatrixXcd::Identity(n, n) +
                    0.5 * A * A.adjoint() / double(n));
      FrameChange fc{w};
      PointForm u(n, 1, 1);
      for (int i = 0; i < u.size(); ++i) u.coeffs()[i] = rand_cplx(rs);
      // star star = id on (1,1) up to the known sign
      PointForm uu = hodge_star(fc, hodge_star(fc, u));
      add("star_involution_n" + std::to_string(n), (uu - u).norm() / u.norm(),
          1e-10);
      PointForm wp = w.form();
      PointForm G = wedge_power(wp, n - 1);
      MetricPoint r = root_n_minus_1(w, G);
      add("root_roundtrip_n" + std::to_string(n), (r.H - w.H).norm() / w.H.norm(),
          1e-10);
      Eigen::MatrixXcd hat = hat_matrix(G);
      double fac = double(factorial(n - 1));
      Eigen::MatrixXcd cof = w.H.determinant() * w.H.inverse();
      add("hat_cofactor_n" + std::to_string(n), (hat / fac - cof).norm() / cof.norm(),
          1e-10);
    }
  } else if (which == "fields") {
    TorusGrid g(2, 8);
    FormField ua = random_field(g, 0, 1, 4, 1.0, 2);
    add("del_squared", del(del(ua)).max_abs() / ua.max_abs(), 1e-11);
    FormField u = random_field(g, 1, 0, 5, 1.0, 2);
    add("dbar_squared", dbar(dbar(u)).max_abs() / u.max_abs(), 1e-11);
    MetricSpec sp;
    sp.kind = MetricSpec::Perturbed;
    sp.H = Eigen::MatrixXcd::Identity(2, 2);
    sp.seed = 3;
    sp.amplitude = 0.2;
    sp.bandlimit = 1;
    MetricField w = sample_metric(g, sp);
    FormField v = random_field(g, 2, 0, 6, 1.0, 2);
    cplx a = l2_inner(w, del(u), v), b = l2_inner(w, u, del_adj(w, v));
    add("del_adjoint", std::abs(a - b) / std::abs(a), 1e-11);
  } else if (which == "hodge") {
    TorusGrid g(2, 8);
    MetricField w = MetricField::constant(g, MetricPoint::identity(2));
    FormField F = random_field(g, 1, 1, 9, 1.0, 2);
    ThreeSpace ts = three_space_decompose(LaplacianKind::Aeppli, w, F);
    add("three_space_reassembly",
        (ts.h + ts.e + ts.c - F).max_abs() / F.max_abs(), 1e-9);
    add("three_space_orthogonality",
        std::abs(l2_inner(w, ts.h, ts.e)) / (l2_norm(w, F) + 1e-300), 1e-9);
    FormField h = harmonic_project(LaplacianKind::BottChern, w, F);
    add("harmonic_idempotent",
        (harmonic_project(LaplacianKind::BottChern, w, h) - h).max_abs() /
            (F.max_abs() + 1e-300),
        1e-9);
  } else if (which == "linearize") {
    TorusGrid g(2, 8);
    MetricField w = MetricField::constant(g, MetricPoint::identity(2));
    FormField phi = random_scalar(g, 11, 0.05, 2);
    MAState st = make_ma_state(w, phi);
    auto [rho, lam, lt] = rho_lambda_tilde(st);
    MetricField ltB = lambda_invariant(st).second;
    double top = 0.0, scale = 0.0;
    for (long x = 0; x < g.npoints(); ++x) {
      top = std::max(top, (lt.H(x) - ltB.H(x)).norm());
      scale = std::max(scale, lt.H(x).norm());
    }
    add("lambda_tilde_two_path", top / scale, 1e-9);
    // directional finite difference of C against the linearization
    FormField h = random_scalar(g, 12, 1.0, 2);
    FormField lin = linearize_apply(st, h);
    double eps = 1e-5;
    FormField hp = h;
    hp *= eps;
    FormField cp = ma_value(make_ma_state(w, phi + hp)),
              cm = ma_value(make_ma_state(w, phi - hp));
    FormField fd = cp - cm;
    fd *= 1.0 / (2 * eps);
    add("linearization_fd", (fd - lin).max_abs() / lin.max_abs(), 1e-5);
  } else {
    fail("unknown selftest: " + which);
  }

  bool ok = true;
  json jchecks = json::array();
  for (const Check& c : checks) {
    ok = ok && c.residual < c.threshold;
    jchecks.push_back({{"name", c.name},
                       {"residual", c.residual},
                       {"threshold", c.threshold},
                       {"pass", c.residual < c.threshold}});
  }
  art.report["checks"] = jchecks;
  art.report["all_pass"] = ok;
  return art.finish(ok ? 0 : 1);
}

// ------------------------------------------------------------------ commands

struct Setup {
  TorusGrid g;
  MetricField w;
  json cfg;
  json provenance;
};

Setup build_setup(const json& cfg) {
  check_keys(cfg, "<root>",
             {"n", "N", "metric", "rhs", "solver", "outputs", "form",
              "laplacian"});
  if (!cfg.contains("n") || !cfg.contains("N"))
    fail("config: 'n' and 'N' are required");
  TorusGrid g(cfg.at("n").get<int>(), cfg.at("N").get<int>());
  json m = cfg.contains("metric") ? cfg.at("metric") : json::object();
  MetricSpec sp = parse_metric_spec(m, g.n);
  MetricField w = sample_metric(g, sp);
  json prov = {{"metric_seed", sp.seed}};
  if (get_or<bool>(m, "gauduchon_normalize", false))
    w = gauduchon_normalize(w);
  return {g, std::move(w), cfg, prov};
}

FormField build_rhs(Setup& s, FormField* phi_star_out) {
  if (!s.cfg.contains("rhs")) fail("config: 'rhs' is required");
  const json& r = s.cfg.at("rhs");
  check_keys(r, "rhs", {"kind", "seed", "amplitude", "bandlimit", "path"});
  std::string kind = get_or<std::string>(r, "kind", "zero");
  if (kind == "zero") return FormField(s.g, 0, 0);
  if (kind == "mms") {
    unsigned seed = get_or<unsigned>(r, "seed", 21u);
    FormField phi_star = random_scalar(s.g, seed, get_or<double>(r, "amplitude", 0.05),
                                       get_or<int>(r, "bandlimit", 2));
    s.provenance["rhs_seed"] = seed;
    if (phi_star_out) *phi_star_out = phi_star;
    return mms_generate(s.w, phi_star);
  }
  if (kind == "file") {
    if (!r.contains("path")) fail("config: rhs.path required for kind=file");
    FormField f = read_field_dump(r.at("path").get<std::string>());
    if (!(f.grid() == s.g) || f.p() != 0 || f.q() != 0)
      fail("rhs dump does not match the configured grid/bidegree");
    return f;
  }
  fail("config: rhs.kind must be zero|mms|file");
}

SolverConfig parse_solver(const json& cfg) {
  SolverConfig sc;
  if (!cfg.contains("solver")) return sc;
  const json& s = cfg.at("solver");
  check_keys(s, "solver",
             {"newton_tol", "max_newton", "krylov_tol", "krylov_max",
              "min_continuity_step", "backtrack_factor", "max_backtracks"});
  sc.newton_tol = get_or<double>(s, "newton_tol", sc.newton_tol);
  sc.max_newton = get_or<int>(s, "max_newton", sc.max_newton);
  sc.krylov_tol = get_or<double>(s, "krylov_tol", sc.krylov_tol);
  sc.krylov_max = get_or<int>(s, "krylov_max", sc.krylov_max);
  sc.min_continuity_step =
      get_or<double>(s, "min_continuity_step", sc.min_continuity_step);
  sc.backtrack_factor =
      get_or<double>(s, "backtrack_factor", sc.backtrack_factor);
  sc.max_backtracks = get_or<int>(s, "max_backtracks", sc.max_backtracks);
  return sc;
}

int run_solve(Setup& s, Artifacts& art) {
  FormField phi_star(s.g, 0, 0);
  bool have_star = s.cfg.contains("rhs") &&
                   s.cfg.at("rhs").value("kind", "zero") == std::string("mms");
  FormField f = build_rhs(s, &phi_star);
  SolveReport rep = newton_solve(s.w, f, parse_solver(s.cfg));

  art.report["converged"] = rep.converged;
  art.report["message"] = rep.message;
  art.report["c"] = rep.c;
  art.report["newton_iters"] = rep.newton_iters;
  art.report["krylov_iters"] = rep.krylov_iters;
  art.report["residuals"] = rep.residuals;
  art.report["min_lambda_eig"] = rep.min_lambda_eig;
  art.report["timings"] = {{"wall_seconds", rep.wall_seconds}};
  if (have_star) {
    FormField target = GaugedFunction::sup_zero(phi_star).values;
    art.report["mms_recovery_error"] =
        (rep.phi.values - target).max_abs();
  }
  art.dump("phi", rep.phi.values);
  art.dump("f", f);
  if (s.cfg.contains("outputs") && s.cfg.at("outputs").contains("csv_slice"))
    art.csv_slice(s.cfg.at("outputs").at("csv_slice"), rep.phi.values);
  art.report["provenance"] = s.provenance;
  return art.finish(rep.converged ? 0 : 2);
}

int run_mms(Setup& s, Artifacts& art) {
  FormField phi_star(s.g, 0, 0);
  FormField f = build_rhs(s, &phi_star);
  art.report["f_max_abs"] = f.max_abs();
  art.report["phi_star_max_abs"] = phi_star.max_abs();
  art.dump("f", f);
  art.dump("phi_star", phi_star);
  art.report["provenance"] = s.provenance;
  return art.finish(0);
}

int run_hodge_decompose(Setup& s, Artifacts& art) {
  json fj = s.cfg.contains("form") ? s.cfg.at("form") : json::object();
  check_keys(fj, "form", {"p", "q", "seed", "amplitude", "bandlimit"});
  int p = get_or<int>(fj, "p", 1), q = get_or<int>(fj, "q", 1);
  unsigned seed = get_or<unsigned>(fj, "seed", 9u);
  FormField F = random_field(s.g, p, q, seed, get_or<double>(fj, "amplitude", 1.0),
                             get_or<int>(fj, "bandlimit", 1));
  s.provenance["form_seed"] = seed;
  std::string lk = get_or<std::string>(s.cfg, "laplacian", "aeppli");
  LaplacianKind kind = lk == "aeppli" ? LaplacianKind::Aeppli
                      : lk == "bottchern" ? LaplacianKind::BottChern
                      : (fail("config: laplacian must be aeppli|bottchern"),
                         LaplacianKind::Aeppli);
  ThreeSpace ts = three_space_decompose(kind, s.w, F);
  double nF = l2_norm(s.w, F);
  art.report["norms"] = {{"input", nF},
                         {"harmonic", l2_norm(s.w, ts.h)},
                         {"exact", l2_norm(s.w, ts.e)},
                         {"coexact", l2_norm(s.w, ts.c)}};
  art.report["reassembly_residual"] =
      (ts.h + ts.e + ts.c - F).max_abs() / F.max_abs();
  art.report["orthogonality_residual"] =
      std::abs(l2_inner(s.w, ts.h, ts.e)) / (nF * nF + 1e-300);
  art.dump("harmonic", ts.h);
  art.dump("exact", ts.e);
  art.dump("coexact", ts.c);
  art.report["provenance"] = s.provenance;
  return art.finish(art.report["reassembly_residual"].get<double>() < 1e-8 ? 0
                                                                           : 2);
}

int run_cone_check(Setup& s, Artifacts& art) {
  art.report["gauduchon_residual"] = gauduchon_residual(s.w);
  FormField wn1 = wedge_power_field(s.w.form(), s.g.n - 1);
  art.report["t_map_defect"] = t_map_defect(s.w, wn1);
  art.report["min_metric_eig"] = s.w.min_eigenvalue();
  return art.finish(0);
}

int run_normalize(Setup& s, Artifacts& art) {
  double before = gauduchon_residual(s.w);
  MetricField gm = gauduchon_normalize(s.w);
  double after = gauduchon_residual(gm);
  double lo = 1e300, hi = 0.0;
  for (long x = 0; x < s.g.npoints(); ++x) {
    double psi = (gm.H(x)(0, 0) / s.w.H(x)(0, 0)).real();
    psi = std::pow(psi, double(s.g.n - 1));
    lo = std::min(lo, psi);
    hi = std::max(hi, psi);
  }
  art.report["residual_before"] = before;
  art.report["residual_after"] = after;
  art.report["psi_min"] = lo;
  art.report["psi_max"] = hi;
  art.dump("gamma_form", gm.form());
  return art.finish(after < 1e-8 && lo > 0 ? 0 : 2);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gauduchon Monge-Ampere toolkit"};
  app.require_subcommand(1);
  std::string config_path, out_path, dump_dir, selftest_which;
  int threads = 1;
  bool verbose = false;
  app.add_option("--config", config_path, "JSON config path");
  app.add_option("--out", out_path, "report path (overrides config)");
  app.add_option("--dump-fields", dump_dir, "field dump directory (overrides config)");
  app.add_option("--threads", threads, "worker threads for dense kernels");
  app.add_flag("--verbose", verbose, "progress to stderr");

  CLI::App* selftest = app.add_subcommand("selftest", "built-in checks");
  selftest->add_option("which", selftest_which, "algebra|fields|hodge|linearize")
      ->required();
  CLI::App* solve = app.add_subcommand("solve", "Newton/continuity solve");
  CLI::App* mms = app.add_subcommand("mms", "manufactured right-hand side");
  CLI::App* hodge = app.add_subcommand("hodge-decompose", "three-space split");
  CLI::App* cone = app.add_subcommand("cone-check", "Gauduchon cone diagnostics");
  CLI::App* norm =
      app.add_subcommand("gauduchon-normalize", "conformal normalization");
  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();
  CLI11_PARSE(app, argc, argv);
  Eigen::setNbThreads(threads);

  try {
    Artifacts art;
    art.report_path = out_path;
    art.dump_dir = dump_dir;
    art.report["version"] = kVersion;

    if (selftest->parsed()) {
      art.report["command"] = "selftest " + selftest_which;
      return run_selftest(selftest_which, art, verbose);
    }

    if (config_path.empty()) fail("--config is required for this command");
    json cfg = load_config(config_path);
    Setup s = build_setup(cfg);
    if (cfg.contains("outputs")) {
      const json& o = cfg.at("outputs");
      check_keys(o, "outputs", {"report", "dump_fields", "csv_slice"});
      if (art.report_path.empty())
        art.report_path = get_or<std::string>(o, "report", "");
      if (art.dump_dir.empty())
        art.dump_dir = get_or<std::string>(o, "dump_fields", "");
    }
    art.report["command"] = app.get_subcommands().front()->get_name();
    art.report["config"] = cfg;
    if (solve->parsed()) return run_solve(s, art);
    if (mms->parsed()) return run_mms(s, art);
    if (hodge->parsed()) return run_hodge_decompose(s, art);
    if (cone->parsed()) return run_cone_check(s, art);
    if (norm->parsed()) return run_normalize(s, art);
    return 1;
  } catch (const config_error& e) {
    fail(e.what());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
