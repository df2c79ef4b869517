#pragma once

// Newton/continuity solution of C(phi) = e^{f+c} with the auxiliary constant
// c as an explicit bordered unknown, plus manufactured-solution generation.
// The iteration runs in the mean-zero gauge; the discrete gauge modes of the
// pseudo-spectral derivative (every Fourier mode whose axis indices all lie
// in {0, N/2} has identically zero derivatives) are projected out of both the
// unknown and the equation, which keeps the bordered Jacobian nonsingular.

#include <chrono>
#include <string>
#include <vector>

#include "gauduchon/cone.hpp"
#include "gauduchon/krylov.hpp"
#include "gauduchon/ma_operator.hpp"

namespace gauduchon {

struct SolverConfig {
  double newton_tol = 1e-10;  // residual L-inf target
  int max_newton = 30;        // per continuity step
  double krylov_tol = 1e-8;
  int krylov_max = 500;
  double min_continuity_step = 1.0 / 64;
  double backtrack_factor = 0.5;
  int max_backtracks = 20;
};

struct SolveReport {
  bool converged = false;
  GaugedFunction phi;            // sup-zero gauge
  double c = 0.0;
  std::vector<double> residuals;  // accepted Newton residuals along the path
  int newton_iters = 0;
  long krylov_iters = 0;
  double min_lambda_eig = 0.0;   // smallest Lambda eigenvalue seen on the path
  double wall_seconds = 0.0;
  std::string message;
};

// f with exact discrete solution (phi_star - sup phi_star, c = 0).
inline FormField mms_generate(const MetricField& w, const FormField& phi_star) {
  MAState st = make_ma_state(w, phi_star);
  FormField f(w.grid(), 0, 0);
  for (long x = 0; x < f.npoints(); ++x)
    f.at(0, x) = std::log(st.Cval.at(0, x).real());
  return f;
}

inline GaugedFunction gauge(const FormField& phi, GaugedFunction::Gauge g) {
  return g == GaugedFunction::MeanZero ? GaugedFunction::mean_zero(phi)
                                       : GaugedFunction::sup_zero(phi);
}

namespace detail {

// Modes with all axis indices in {0, N/2}: identically zero derivatives.
inline std::vector<char> special_mode_mask(const TorusGrid& g) {
  long m = g.npoints();
  std::vector<char> mask(m, 0);
  for (long x = 0; x < m; ++x) {
    auto idx = g.decode(x);
    bool sp = true;
    for (int a = 0; a < 2 * g.n && sp; ++a)
      sp = (idx[a] == 0 || idx[a] == g.N / 2);
    mask[x] = sp ? 1 : 0;
  }
  return mask;
}

}  // namespace detail

inline SolveReport newton_solve(const MetricField& w, const FormField& f,
                                const SolverConfig& cfg,
                                const FormField* initial = nullptr) {
  if (!(cfg.newton_tol > 0) || !(cfg.krylov_tol > 0) || cfg.max_newton <= 0 ||
      cfg.krylov_max <= 0)
    throw config_error("newton_solve: tolerances must be positive");
  double gres = gauduchon_residual(w);
  if (gres > 1e-9)
    throw config_error("newton_solve: background is not Gauduchon (residual " +
                       std::to_string(gres) + ")");
  auto t_start = std::chrono::steady_clock::now();
  const TorusGrid& g = w.grid();
  int n = g.n;
  long m = g.npoints();
  SolveReport rep;
  rep.min_lambda_eig = std::numeric_limits<double>::max();

  // principal symbol of the linearization at the averaged metric:
  // -(1/(n-1)) s^H Havg^{-1} s per mode
  Eigen::MatrixXcd Havg = Eigen::MatrixXcd::Zero(n, n);
  for (long x = 0; x < m; ++x) Havg += w.H(x);
  Havg /= double(m);
  Eigen::MatrixXcd Hinv = Havg.inverse();
  const auto& syms = dz_symbols(g);
  Eigen::VectorXd sym(m);
  for (long x = 0; x < m; ++x) {
    Eigen::VectorXcd s(n);
    for (int j = 0; j < n; ++j) s[j] = syms[j][x];
    sym[x] = -(s.dot(Hinv * s)).real() / double(n - 1);
  }
  std::vector<char> special = detail::special_mode_mask(g);
  double floor_ = 1e-8 * sym.cwiseAbs().maxCoeff();

  FormField phi(g, 0, 0);
  if (initial) phi = GaugedFunction::mean_zero(*initial).values;
  double c = 0.0;

  auto finish = [&](bool ok, const std::string& msg) {
    rep.converged = ok;
    rep.message = msg;
    rep.phi = GaugedFunction::sup_zero(phi);
    rep.c = c;
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    return rep;
  };

  // one Newton solve at fixed continuity parameter; returns success
  auto newton_at = [&](double t, std::string& why) {
    FormField base(g, 0, 0);  // e^{t f}
    for (long x = 0; x < m; ++x)
      base.at(0, x) = std::exp(t * f.at(0, x).real());
    MAState st;
    try {
      st = make_ma_state(w, phi);
    } catch (const positivity_error& e) {
      why = std::string("positivity collapse at step start: ") + e.what();
      return false;
    }
    for (int it = 0; it < cfg.max_newton; ++it) {
      rep.min_lambda_eig = std::min(rep.min_lambda_eig, st.lambda_min_eig);
      FormField efld = base;
      efld *= std::exp(c);
      FormField R = st.Cval - efld;
      double res = R.max_abs();
      rep.residuals.push_back(res);
      if (res <= cfg.newton_tol) return true;

      // bordered Jacobian in spectral coordinates: x = (hat h, dc)
      VecOp A = [&](const Eigen::VectorXcd& xv) {
        Eigen::VectorXcd hv = xv.head(m);
        for (long x = 0; x < m; ++x)
          if (special[x]) hv[x] = 0.0;
        FormField h(g, 0, 0);
        h.data() = hv;
        Fft::instance().backward(g, h.plane(0));
        FormField y = linearize_apply(st, h);
        FormField ec = efld;
        ec *= xv[m];
        y -= ec;
        Eigen::VectorXcd out(m + 1);
        out.head(m) = y.data();
        Fft::instance().forward(g, out.data());
        for (long x = 1; x < m; ++x)
          if (special[x]) out[x] = 0.0;
        out[m] = 0.0;
        return out;
      };
      cplx e0 = 0.0;
      for (long x = 0; x < m; ++x) e0 += efld.at(0, x);
      VecOp Minv = [&](const Eigen::VectorXcd& r) {
        Eigen::VectorXcd z = Eigen::VectorXcd::Zero(m + 1);
        z.head(m) = r.head(m);
        for (long x = 0; x < m; ++x) {
          if (special[x]) z[x] = 0.0;
          else z[x] /= (std::abs(sym[x]) > floor_ ? sym[x] : -floor_);
        }
        z[m] = -r[0] / e0;
        return z;
      };
      Eigen::VectorXcd b(m + 1);
      b.head(m) = -R.data();
      Fft::instance().forward(g, b.data());
      for (long x = 1; x < m; ++x)
        if (special[x]) b[x] = 0.0;
      b[m] = 0.0;

      KrylovResult kr = gmres(A, Minv, b, cfg.krylov_tol, cfg.krylov_max);
      rep.krylov_iters += kr.iterations;
      if (!kr.converged) {
        why = "krylov non-convergence (relative residual " +
              std::to_string(kr.rel_residual) + ")";
        return false;
      }
      Eigen::VectorXcd hv = kr.x.head(m);
      for (long x = 0; x < m; ++x)
        if (special[x]) hv[x] = 0.0;
      FormField h(g, 0, 0);
      h.data() = hv;
      Fft::instance().backward(g, h.plane(0));
      for (long x = 0; x < m; ++x) h.at(0, x) = h.at(0, x).real();
      double dc = kr.x[m].real();

      // backtracking line search, shrinking whenever positivity fails
      double alpha = 1.0;
      bool accepted = false;
      for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
        FormField step = h;
        step *= alpha;
        FormField phi_try = phi + step;
        double c_try = c + alpha * dc;
        MAState st_try;
        try {
          st_try = make_ma_state(w, phi_try);
        } catch (const positivity_error&) {
          alpha *= cfg.backtrack_factor;
          continue;
        }
        FormField e_try = base;
        e_try *= std::exp(c_try);
        double res_try = (st_try.Cval - e_try).max_abs();
        if (res_try <= res * (1.0 - 1e-4 * alpha)) {
          phi = phi_try;
          c = c_try;
          st = std::move(st_try);
          accepted = true;
          break;
        }
        alpha *= cfg.backtrack_factor;
      }
      ++rep.newton_iters;
      if (!accepted) {
        why = "line search failed at residual " + std::to_string(res);
        return false;
      }
    }
    why = "newton iteration limit reached";
    return false;
  };

  double t = 0.0, step = 1.0;
  while (t < 1.0) {
    double t_try = std::min(1.0, t + step);
    FormField phi_save = phi;
    double c_save = c;
    std::string why;
    if (newton_at(t_try, why)) {
      t = t_try;
    } else {
      phi = phi_save;
      c = c_save;
      step *= 0.5;
      if (step < cfg.min_continuity_step)
        return finish(false, "continuity step underflow: " + why);
    }
  }
  return finish(true, "converged");
}

}  // namespace gauduchon
