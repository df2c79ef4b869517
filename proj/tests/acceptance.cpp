// Acceptance gate: runs the seven release criteria end to end and prints one
// PASS/FAIL line each.  Usage: acceptance <cli-binary> <repo-root>.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gauduchon/field_io.hpp"
#include "gauduchon/random_field.hpp"
#include "gauduchon/solver.hpp"
#include "test_util.hpp"

using namespace gauduchon;
using namespace gtest_util;

namespace {

struct Gate {
  bool ok = true;
  std::ostringstream why;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      if (!ok) why << "; ";
      ok = false;
      why << what;
    }
  }
  void expect_lt(double val, double thr, const std::string& what) {
    expect(val < thr, what + " = " + std::to_string(val));
  }
};

MetricField perturbed(const TorusGrid& g, unsigned seed, double amp) {
  MetricSpec sp;
  sp.kind = MetricSpec::Perturbed;
  sp.H = Eigen::MatrixXcd::Identity(g.n, g.n);
  sp.seed = seed;
  sp.amplitude = amp;
  sp.bandlimit = 1;
  return sample_metric(g, sp);
}

double rel(double err, double scale) { return err / std::max(scale, 1e-300); }

// ---------------------------------------------------------------- criterion 1

void criterion_algebra(Gate& t) {
  for (int n : {2, 3, 4}) {
    auto& g = rng(9000 + n);
    double worst_star = 0, worst_prim = 0, worst_lem = 0, worst_two = 0,
           worst_root = 0, worst_det = 0;
    for (int seed = 0; seed < 200; ++seed) {
      MetricPoint w = random_metric(n, g);
      PointForm u = random_form(n, 1, 1, g);
      PointForm uu = hodge_star(w, hodge_star(w, u));
      worst_star = std::max(worst_star, rel((uu - u).norm(), u.norm()));

      PointForm a = random_real_form(n, 1, g);
      PointForm prim = lefschetz_decompose_11(w, a).first;
      PointForm ps = hodge_star(w, prim);
      PointForm pr = wedge(prim, wedge_power(w.form(), n - 2));
      pr *= -1.0 / double(factorial(n - 2));
      worst_prim = std::max(worst_prim, rel((ps - pr).norm(), a.norm() + 1));

      // star(a ^ w^{n-2}/(n-2)!) = -a + (tr_w a) w, and the trace transform
      PointForm l2 = hodge_star(w, cplx(1.0 / factorial(n - 2)) *
                                       wedge(a, wedge_power(w.form(), n - 2)));
      PointForm r2 =
          cplx(-1.0) * a + cplx(lefschetz_contract(w, a)) * w.form();
      worst_lem = std::max(worst_lem, rel((l2 - r2).norm(), a.norm() + 1));
      PointForm G = random_real_form(n, n - 1, g);
      PointForm wn1 = wedge_power(w.form(), n - 1);
      wn1 *= 1.0 / factorial(n - 1);
      cplx tl = trace_relative(wn1, G, w);
      double tr = lefschetz_contract(w, hodge_star(w, G));
      worst_lem = std::max(worst_lem, rel(std::abs(tl - cplx(tr)),
                                          std::abs(tr) + 1));

      auto [lhs, rhs] =
          trace_star_two_metrics(w, random_metric(n, g), G);
      worst_two = std::max(worst_two, rel(std::abs(lhs - rhs),
                                          std::abs(lhs) + 1));

      MetricPoint gam = random_metric(n, g);
      PointForm Gp = wedge_power(gam.form(), n - 1);
      for (int wb = 0; wb < 2; ++wb) {
        MetricPoint w0 = wb ? w : MetricPoint::identity(n);
        MetricPoint r = root_n_minus_1(w0, Gp);
        worst_root = std::max(worst_root, rel((r.H - gam.H).norm(),
                                              gam.H.norm()));
      }
      auto [dl, dr] = det_relation_check(MetricPoint::identity(n), Gp);
      worst_det = std::max(worst_det, rel(std::abs(dl - dr),
                                          std::abs(dr) + 1));
    }
    std::string tag = " (n=" + std::to_string(n) + ")";
    t.expect_lt(worst_star, 1e-10, "star involution" + tag);
    t.expect_lt(worst_prim, 1e-10, "primitive star" + tag);
    t.expect_lt(worst_lem, 1e-10, "(1,1) star/trace identities" + tag);
    t.expect_lt(worst_two, 1e-10, "two-metric trace" + tag);
    t.expect_lt(worst_root, 1e-10, "root roundtrip" + tag);
    t.expect_lt(worst_det, 1e-10, "determinant identity" + tag);
  }
}

// ---------------------------------------------------------------- criterion 2

void criterion_differential(Gate& t) {
  for (auto [n, N] : {std::pair{2, 16}, std::pair{3, 8}}) {
    TorusGrid g(n, N);
    std::string tag = " (n=" + std::to_string(n) + ")";

    FormField ua = random_field(g, 0, 1, 4, 1.0, 2);
    FormField ub = random_field(g, 1, 0, 5, 1.0, 2);
    t.expect_lt(rel(del(del(ua)).max_abs(), ua.max_abs()), 1e-11,
                "del squared" + tag);
    t.expect_lt(rel(dbar(dbar(ub)).max_abs(), ub.max_abs()), 1e-11,
                "dbar squared" + tag);
    FormField sc = random_scalar(g, 6, 1.0, 2);
    FormField anti = del(dbar(sc)) + dbar(del(sc));
    t.expect_lt(rel(anti.max_abs(), sc.max_abs()), 1e-11,
                "anticommutation" + tag);

    MetricField w = perturbed(g, 7, 0.2);
    FormField v = random_field(g, 2, 0, 8, 1.0, 2);
    cplx a1 = l2_inner(w, del(ub), v), a2 = l2_inner(w, ub, del_adj(w, v));
    t.expect_lt(rel(std::abs(a1 - a2), std::abs(a1)), 1e-11,
                "weighted del adjoint" + tag);
    FormField vb = random_field(g, 1, 1, 9, 1.0, 2);
    cplx b1 = l2_inner(w, dbar(ub), vb), b2 = l2_inner(w, ub, dbar_adj(w, vb));
    t.expect_lt(rel(std::abs(b1 - b2), std::abs(b1)), 1e-11,
                "weighted dbar adjoint" + tag);

    // constant metric: del* = -star dbar star (continuum formula)
    MetricField k = MetricField::constant(g, random_metric(n, rng(100 + n)));
    FormField cont = star_field(k, dbar(star_field(k, v)));
    cont *= -1.0;
    t.expect_lt(rel((del_adj(k, v) - cont).max_abs(), v.max_abs()), 1e-10,
                "continuum adjoint" + tag);
  }
}

// ---------------------------------------------------------------- criterion 3

void criterion_hodge(Gate& t) {
  TorusGrid g(2, 8);
  MetricField w = MetricField::constant(g, random_metric(2, rng(19)));

  for (auto kind : {LaplacianKind::BottChern, LaplacianKind::Aeppli}) {
    FormField F = random_field(g, 1, 1, 41, 1.0, 3);
    ThreeSpace ts = three_space_decompose(kind, w, F);
    double s2 = std::pow(l2_norm(w, F), 2);
    t.expect_lt(rel((ts.h + ts.e + ts.c - F).norm(), F.norm()), 1e-9,
                "three-space reassembly");
    t.expect_lt(std::abs(l2_inner(w, ts.h, ts.e)) / s2, 1e-9,
                "three-space orthogonality h/e");
    t.expect_lt(std::abs(l2_inner(w, ts.e, ts.c)) / s2, 1e-9,
                "three-space orthogonality e/c");
  }

  FormField gsc = random_field(g, 0, 0, 51, 1.0, 3);
  FormField v = ddbar(gsc);
  FormField u1 = min_ddbar_solve(w, v, MinDdbarVia::BC);
  FormField u2 = min_ddbar_solve(w, v, MinDdbarVia::DdbarBar);
  t.expect_lt(rel((u1 - u2).norm(), u1.norm()), 1e-8, "solution formula match");
  t.expect_lt(rel((ddbar(u1) - v).norm(), v.norm()), 1e-8, "solution residual");
  GreenSolve gs{LaplacianKind::BottChern};
  FormField Gv = green_apply(gs, w, v);
  t.expect_lt(rel(del(Gv).norm(), v.norm()), 1e-9, "del vanishing");
  t.expect_lt(rel(dbar(Gv).norm(), v.norm()), 1e-9, "dbar vanishing");

  double lam1 = smallest_positive_eigenvalue(LaplacianKind::BottChern, w, 1, 1);
  t.expect(lam1 > 0, "positive spectral gap");
  bool est = true;
  for (int seed = 0; seed < 50; ++seed) {
    FormField vv = ddbar(random_field(g, 0, 0, 500 + seed, 1.0, 3));
    FormField uu = min_ddbar_solve(w, vv, MinDdbarVia::BC);
    double nu2 = std::pow(l2_norm(w, uu), 2),
           nv2 = std::pow(l2_norm(w, vv), 2);
    est = est && nu2 <= nv2 / lam1 * (1 + 1e-9);
  }
  t.expect(est, "norm estimate on 50 exact inputs");

  FormField h = harmonic_project(LaplacianKind::BottChern, w,
                                 random_field(g, 1, 1, 61, 1.0, 3));
  FormField sh = star_field(w, h);
  t.expect_lt(rel(laplacian_apply(LaplacianKind::Aeppli, w, sh).norm(),
                  h.norm()),
              1e-9, "star maps BC-harmonic to A-harmonic");
  cplx pair0 = integrate_top(wedge_field(h, star_field(w, conj_field(h))));
  double n2 = std::pow(l2_norm(w, h), 2);
  t.expect_lt(std::abs(pair0 - cplx(n2)) / n2, 1e-9, "duality pairing");
}

// ---------------------------------------------------------------- criterion 4

void criterion_linearization(Gate& t) {
  auto fd_order = [](const MetricField& w, const FormField& phi,
                     const FormField& h) {
    MAState st = make_ma_state(w, phi);
    FormField dC = linearize_apply(st, h);
    std::vector<double> le, lr;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      FormField pe = phi;
      FormField eh = h;
      eh *= eps;
      pe += eh;
      FormField r = make_ma_state(w, pe).Cval - st.Cval;
      FormField lin = dC;
      lin *= eps;
      r -= lin;
      le.push_back(std::log10(eps));
      lr.push_back(std::log10(r.max_abs()));
    }
    double m = le.size(), sx = 0, sy = 0, sxy = 0, sxx = 0;
    for (size_t i = 0; i < le.size(); ++i) {
      sx += le[i]; sy += lr[i]; sxy += le[i] * lr[i]; sxx += le[i] * le[i];
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
  };

  TorusGrid g2(2, 8);
  Eigen::MatrixXcd H(2, 2);
  H << 1.5, cplx(0.2, -0.3), cplx(0.2, 0.3), 2.0;
  MetricField k2 = MetricField::constant(g2, MetricPoint(H));
  TorusGrid g3(3, 4);
  MetricField w3 = gauduchon_normalize(perturbed(g3, 9, 0.1));
  t.expect(del(w3.form()).max_abs() > 1e-3, "n=3 background non-Kahler");

  int state = 0;
  for (auto [w, phi, h] : {
           std::tuple{k2, random_scalar(g2, 3, 0.04, 2),
                      random_scalar(g2, 4, 1.0, 2)},
           std::tuple{k2, random_scalar(g2, 13, 0.04, 2),
                      random_scalar(g2, 14, 1.0, 2)},
           std::tuple{gauduchon_normalize(perturbed(g2, 8, 0.2)),
                      random_scalar(g2, 5, 0.03, 2),
                      random_scalar(g2, 6, 1.0, 2)},
           std::tuple{w3, random_scalar(g3, 7, 0.02, 1),
                      random_scalar(g3, 10, 1.0, 1)},
           std::tuple{w3, random_scalar(g3, 17, 0.02, 1),
                      random_scalar(g3, 18, 1.0, 1)},
       }) {
    double slope = fd_order(w, phi, h);
    t.expect(slope > 1.9, "finite-difference order at state " +
                              std::to_string(state) + " = " +
                              std::to_string(slope));
    ++state;
  }

  for (auto* wp : {&k2, &w3}) {
    const TorusGrid& g = wp->grid();
    MAState st = make_ma_state(
        *wp, random_scalar(g, 21, 0.02, 1));
    auto [rho, lamA, ltA] = rho_lambda_tilde(st);
    MetricField ltB = lambda_invariant(st).second;
    double top = 0, scale = 0;
    for (long x = 0; x < g.npoints(); ++x) {
      top = std::max(top, (ltA.H(x) - ltB.H(x)).norm());
      scale = std::max(scale, ltA.H(x).norm());
    }
    t.expect_lt(top / scale, 1e-9, "lambda-tilde two-path");
  }

  // phi = 0, Kahler: the normalized linearization is lap_w / (n-1)
  {
    MAState st = make_ma_state(k2, FormField(g2, 0, 0));
    FormField h = random_scalar(g2, 31, 1.0, 3);
    FormField lin = linearize_apply(st, h);
    FormField dd = ddbar(h);
    FormField lap(g2, 0, 0);
    Eigen::MatrixXcd A(2, 2);
    for (long x = 0; x < g2.npoints(); ++x) {
      PointForm d = dd.point(x);
      for (int j = 0; j < 2; ++j)
        for (int kk = 0; kk < 2; ++kk)
          A(j, kk) = d.at(mask_t(1) << j, mask_t(1) << kk);
      lap.at(0, x) = k2.H(x).partialPivLu().solve(A).trace().real();
    }
    t.expect_lt(rel((lin - lap).max_abs(), lap.max_abs() + 1), 1e-10,
                "closed-form linearization at phi=0");
  }

  // pointwise identity <gamma/C, i ddbar h>_w = (n-1)! tr_rho(i ddbar h)
  {
    MetricField w = gauduchon_normalize(perturbed(g2, 8, 0.2));
    MAState st = make_ma_state(w, random_scalar(g2, 5, 0.03, 2));
    FormField dd = ddbar(random_scalar(g2, 60, 1.0, 1));
    double worst = 0;
    Eigen::MatrixXcd A(2, 2);
    for (long x = 0; x < g2.npoints(); x += 97) {
      MetricPoint wp = w.at(x);
      double C = st.Cval.at(0, x).real();
      PointForm d = dd.point(x);
      for (int j = 0; j < 2; ++j)
        for (int kk = 0; kk < 2; ++kk)
          A(j, kk) = d.at(mask_t(1) << j, mask_t(1) << kk);
      PointForm af = cplx(1.0 / C) * st.gamma.at(x).form();
      double lhs = inner_product(wp, cplx(0, 1) * d, af).real();
      double rhs = st.rho.H(x).partialPivLu().solve(A).trace().real();
      worst = std::max(worst,
                       std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    t.expect_lt(worst, 1e-10, "pointwise trace identity");
  }
}

// ---------------------------------------------------------------- criterion 5

void criterion_solver(Gate& t) {
  SolverConfig cfg;

  // Kahler background, n=2 N=16
  {
    TorusGrid g(2, 16);
    Eigen::MatrixXcd H(2, 2);
    H << 1.5, cplx(0.2, -0.1), cplx(0.2, 0.1), 1.0;
    MetricField w = MetricField::constant(g, MetricPoint(H));
    FormField phi_star = random_scalar(g, 21, 0.05, 2);
    SolveReport r = newton_solve(w, mms_generate(w, phi_star), cfg);
    t.expect(r.converged, "n=2 Kahler MMS converged");
    t.expect(r.newton_iters <= 15, "n=2 Kahler MMS iteration budget");
    FormField target = GaugedFunction::sup_zero(phi_star).values;
    t.expect_lt((r.phi.values - target).max_abs(), 1e-7,
                "n=2 Kahler MMS recovery");
    t.expect_lt(std::abs(r.c), 1e-7, "n=2 Kahler MMS constant");
  }

  // non-Kahler Gauduchon background, n=3 N=8
  {
    TorusGrid g(3, 8);
    MetricField w = gauduchon_normalize(perturbed(g, 7, 0.1));
    t.expect(del(w.form()).max_abs() > 1e-3, "n=3 background non-Kahler");
    FormField phi_star = random_scalar(g, 21, 0.05, 2);
    SolveReport r = newton_solve(w, mms_generate(w, phi_star), cfg);
    t.expect(r.converged, "n=3 Gauduchon MMS converged");
    t.expect(r.newton_iters <= 15, "n=3 Gauduchon MMS iteration budget");
    FormField target = GaugedFunction::sup_zero(phi_star).values;
    t.expect_lt((r.phi.values - target).max_abs(), 1e-7,
                "n=3 Gauduchon MMS recovery");
    t.expect_lt(std::abs(r.c), 1e-7, "n=3 Gauduchon MMS constant");
  }

  // uniqueness and shift covariance on a small Gauduchon background
  {
    TorusGrid g(2, 8);
    MetricField w = gauduchon_normalize(perturbed(g, 7, 0.2));
    FormField f = mms_generate(w, random_scalar(g, 21, 0.05, 2));
    SolveReport a = newton_solve(w, f, cfg);
    FormField seed = random_scalar(g, 99, 1e-3, 2);
    SolveReport b = newton_solve(w, f, cfg, &seed);
    t.expect(a.converged && b.converged, "uniqueness probe solves converged");
    t.expect_lt((a.phi.values - b.phi.values).max_abs(), 1e-6,
                "uniqueness probe");
    FormField fs = f;
    for (long x = 0; x < g.npoints(); ++x) fs.at(0, x) += 0.3;
    SolveReport c = newton_solve(w, fs, cfg);
    t.expect(c.converged, "shifted solve converged");
    t.expect_lt(std::abs(c.c - (a.c - 0.3)), 1e-8, "shift covariance of c");
    t.expect_lt((a.phi.values - c.phi.values).max_abs(), 1e-8,
                "shift covariance of phi");
  }

  // n=2 pipeline equals the classical operator coded independently
  {
    TorusGrid g(2, 8);
    Eigen::MatrixXcd H(2, 2);
    H << 1.2, cplx(0.1, -0.2), cplx(0.1, 0.2), 0.9;
    MetricField w = MetricField::constant(g, MetricPoint(H));
    FormField phi = random_scalar(g, 33, 0.04, 2);
    MAState st = make_ma_state(w, phi);
    FormField L = w.form();
    L += cplx(0, 1) * ddbar(phi);
    FormField num = wedge_field(L, L), den = wedge_field(w.form(), w.form());
    double worst = 0;
    for (long x = 0; x < g.npoints(); ++x)
      worst = std::max(worst, std::abs(st.Cval.at(0, x) -
                                       num.at(0, x) / den.at(0, x)));
    t.expect_lt(worst, 1e-12, "classical n=2 operator match");
  }
}

// ---------------------------------------------------------------- criterion 6

void criterion_cone(Gate& t) {
  TorusGrid g(2, 6);
  int n = g.n;
  MetricField w = gauduchon_normalize(perturbed(g, 7, 0.2));
  MetricField w2 = gauduchon_normalize(perturbed(g, 11, 0.15));
  t.expect_lt(gauduchon_residual(w), 1e-8, "normalization residual");
  double psi_min = 1e300;
  MetricField raw = perturbed(g, 7, 0.2);
  for (long x = 0; x < g.npoints(); ++x)
    psi_min = std::min(psi_min, (w.H(x)(0, 0) / raw.H(x)(0, 0)).real());
  t.expect(psi_min > 0, "conformal factor positive");

  FormField wn1 = wedge_power_field(w.form(), n - 1);
  double d0 = t_map_defect(w, wn1);
  t.expect_lt(d0, 1e-8 * (l2_norm(w, del(wn1)) + 1.0), "sG defect");
  double d2 = t_map_defect(w2, wedge_power_field(w2.form(), n - 1));
  t.expect_lt(d2, 1e-8 * (l2_norm(w2, del(w2.form())) + 1.0), "sG defect 2");
  FormField Om2 = wn1 + del(random_field(g, n - 2, n - 1, 31, 0.05, 1)) +
                  dbar(random_field(g, n - 1, n - 2, 32, 0.05, 1));
  t.expect_lt(std::abs(t_map_defect(w, Om2) - d0), 1e-9,
              "defect representative-independence");

  ThreeSpace ts = three_space_decompose(LaplacianKind::Aeppli, w, wn1);
  FormField D(g, n - 1, n - 1);
  for (long x = 0; x < g.npoints(); ++x)
    D.set_point(x, wedge_power(MetricPoint::identity(n).form(), n - 1));
  FormField De = D;
  De *= 0.05;
  MetricField gm = gauduchon_reconstruct(w, ts.h + De);
  t.expect_lt(gauduchon_residual(gm), 1e-8, "reconstructed metric Gauduchon");
  bool threw = false;
  try {
    FormField Dbig = D;
    Dbig *= -5.0;
    metric_root_field(w, ts.h + Dbig + ts.e);
  } catch (const positivity_error&) {
    threw = true;
  }
  t.expect(threw, "reconstruction fails cleanly outside the cone");

  FormField a = wn1, b = wedge_power_field(w2.form(), n - 1);
  MetricField rootsum = metric_root_field(w, a + b);
  t.expect_lt(gauduchon_residual(rootsum), 1e-8, "convexity: root of sum");
  FormField ra = aeppli_harmonic_rep(w, a).rep;
  FormField rb = aeppli_harmonic_rep(w, b).rep;
  FormField rsum = aeppli_harmonic_rep(w, a + b).rep;
  t.expect_lt((rsum - (ra + rb)).max_abs() / (a + b).max_abs(), 1e-8,
              "convexity: classes add");
}

// ---------------------------------------------------------------- criterion 7

void criterion_cli(Gate& t, const std::string& cli, const std::string& root) {
  for (const char* which : {"algebra", "fields", "hodge", "linearize"}) {
    std::string cmd = cli + " selftest " + which +
                      " --out /tmp/acceptance_selftest.json >/dev/null 2>&1";
    t.expect(std::system(cmd.c_str()) == 0,
             std::string("selftest ") + which + " exits 0");
  }

  std::string cmd = cli + " solve --config " + root +
                    "/configs/mms_n2_N16.json --out /tmp/acceptance_solve.json"
                    " >/dev/null 2>&1";
  t.expect(std::system(cmd.c_str()) == 0, "solve exits 0");

  std::ifstream got_f("/tmp/acceptance_solve.json");
  std::ifstream exp_f(root + "/configs/expected/mms_n2_N16.report.json");
  t.expect(bool(got_f) && bool(exp_f), "reports readable");
  if (!t.ok) return;

  // minimal field extraction; the reports are written by our own tool
  auto field = [](std::ifstream& f, const std::string& key) {
    f.clear();
    f.seekg(0);
    std::string line;
    while (std::getline(f, line)) {
      auto pos = line.find("\"" + key + "\":");
      if (pos != std::string::npos)
        return std::stod(line.substr(pos + key.size() + 3));
    }
    return std::nan("");
  };
  double got_err = field(got_f, "mms_recovery_error");
  double exp_err = field(exp_f, "mms_recovery_error");
  double got_c = field(got_f, "c"), exp_c = field(exp_f, "c");
  double got_it = field(got_f, "newton_iters"),
         exp_it = field(exp_f, "newton_iters");
  t.expect_lt(got_err, 1e-7, "report recovery error");
  t.expect_lt(std::abs(got_err - exp_err), 1e-9, "recovery error reproduced");
  t.expect_lt(std::abs(got_c - exp_c), 1e-10, "constant reproduced");
  t.expect(got_it == exp_it, "iteration count reproduced");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <cli-binary> <repo-root>\n";
    return 2;
  }
  std::string cli = argv[1], root = argv[2];

  struct Criterion {
    int num;
    const char* name;
    double budget_s;
    std::function<void(Gate&)> run;
  };
  std::vector<Criterion> cs = {
      {1, "pointwise algebra oracles", 30, criterion_algebra},
      {2, "spectral differential calculus", 60, criterion_differential},
      {3, "Hodge theory of the flat torus", 120, criterion_hodge},
      {4, "operator linearization", 120, criterion_linearization},
      {5, "Newton/continuity solver", 600, criterion_solver},
      {6, "Gauduchon cone diagnostics", 180, criterion_cone},
      {7, "command-line front end", 600,
       [&](Gate& t) { criterion_cli(t, cli, root); }},
  };

  bool all = true;
  for (auto& c : cs) {
    Gate t;
    auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(t);
    } catch (const std::exception& e) {
      t.expect(false, std::string("exception: ") + e.what());
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    t.expect(secs < c.budget_s,
             "runtime " + std::to_string(secs) + "s over budget");
    all = all && t.ok;
    std::ostringstream line;
    line << (t.ok ? "PASS" : "FAIL") << " criterion " << c.num << ": "
         << c.name << " [" << std::fixed << secs << "s]";
    if (!t.ok) line << " -- " << t.why.str();
    std::cout << line.str() << std::endl;
  }
  return all ? 0 : 1;
}
