#pragma once

// The Monge-Ampere-type operator in bidegree (n-1,n-1): the bracketed form
// Lambda(phi), its (n-1)-st root gamma, the dual metrics rho = star_w Lambda
// and lambda-tilde, the pointwise value C(phi), and the analytic linearization
// with its second-order principal part.  The star defining rho is always the
// star of the background metric.

#include <memory>

#include "gauduchon/differential.hpp"

namespace gauduchon {

// Real scalar field in a fixed gauge.
struct GaugedFunction {
  enum Gauge { MeanZero, SupZero };
  FormField values;
  Gauge gauge = MeanZero;

  static GaugedFunction mean_zero(FormField s) {
    double mu = mean_scalar(s);
    cplx* v = s.plane(0);
    for (long x = 0; x < s.npoints(); ++x) v[x] -= mu;
    return {std::move(s), MeanZero};
  }
  static GaugedFunction sup_zero(FormField s) {
    double top = -std::numeric_limits<double>::max();
    cplx* v = s.plane(0);
    for (long x = 0; x < s.npoints(); ++x) top = std::max(top, v[x].real());
    for (long x = 0; x < s.npoints(); ++x) v[x] -= top;
    return {std::move(s), SupZero};
  }
};

// Lambda(phi) = w^{n-1} + i del dbar phi ^ w^{n-2}
//             + (i/2)(del phi ^ dbar(w^{n-2}) - dbar phi ^ del(w^{n-2})).
// The last two terms vanish for constant (in particular Kahler) w.
inline FormField lambda_of_phi(const MetricField& w, const FormField& phi) {
  if (phi.p() != 0 || phi.q() != 0)
    throw degree_error("lambda_of_phi: phi must be a scalar field");
  int n = w.n();
  FormField wf = w.form();
  FormField wn2 = wedge_power_field(wf, n - 2);
  FormField L = wedge_field(wn2, wf);
  L += wedge_field(cplx(0, 1) * ddbar(phi), wn2);
  FormField t = wedge_field(del(phi), dbar(wn2));
  t -= wedge_field(dbar(phi), del(wn2));
  t *= cplx(0, 0.5);
  L += t;
  return L;
}

// Immutable snapshot of the operator at one potential phi.
struct MAState {
  MetricField w;       // background
  FormField phi;       // real scalar
  FormField Lambda;    // (n-1,n-1), positive
  MetricField gamma;   // gamma^{n-1} = Lambda
  MetricField rho;     // star_w Lambda
  MetricField lambda_tilde;
  FormField Cval;      // C(phi) = gamma^n / w^n
  double lambda_min_eig = 0.0;  // grid minimum of Lambda's hat eigenvalues

  // caches for the linearization
  FormField wn2, del_wn2, dbar_wn2;
  std::shared_ptr<std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>>> hat_lu;
};

inline MAState make_ma_state(const MetricField& w, const FormField& phi) {
  const TorusGrid& g = w.grid();
  int n = g.n;
  long m = g.npoints();
  MAState st;
  st.w = w;
  st.phi = phi;
  FormField wf = w.form();
  st.wn2 = wedge_power_field(wf, n - 2);
  st.del_wn2 = del(st.wn2);
  st.dbar_wn2 = dbar(st.wn2);
  st.Lambda = wedge_field(st.wn2, wf);
  st.Lambda += wedge_field(cplx(0, 1) * ddbar(phi), st.wn2);
  FormField t = wedge_field(del(phi), st.dbar_wn2);
  t -= wedge_field(dbar(phi), st.del_wn2);
  t *= cplx(0, 0.5);
  st.Lambda += t;

  st.Cval = FormField(g, 0, 0);
  st.hat_lu = std::make_shared<std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>>>();
  st.hat_lu->reserve(m);
  std::vector<Eigen::MatrixXcd> Hg(m), Hr(m), Hlt(m);
  double fac = double(factorial(n - 1));

  // worst positivity violation over the grid, reported after the full scan
  double worst_ratio = std::numeric_limits<double>::max(), worst_min = 0.0;
  long worst_x = -1;
  st.lambda_min_eig = std::numeric_limits<double>::max();
  for (long x = 0; x < m; ++x) {
    const Frame& fr = w.frame(x);
    FrameChange fc = frame_change_of(fr);
    Eigen::MatrixXcd hat_amb = hat_matrix(st.Lambda.point(x));
    st.hat_lu->push_back(hat_amb.partialPivLu());
    Eigen::MatrixXcd ho = hat_to_orthonormal(fc, fr.detH, hat_amb) / fac;
    double drift = (ho - ho.adjoint()).norm();
    if (drift > 1e-8 * std::max(1.0, ho.norm()))
      throw metric_error("make_ma_state: Lambda is not a real form");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        0.5 * (ho + ho.adjoint().eval()));
    const Eigen::VectorXd& lam = es.eigenvalues();
    double hi = lam.maxCoeff(), lo = lam.minCoeff();
    st.lambda_min_eig = std::min(st.lambda_min_eig, lo);
    double ratio = lo / std::max(hi, 1e-300);
    if (ratio < worst_ratio) {
      worst_ratio = ratio;
      worst_min = lo;
      worst_x = x;
    }
    if (!(lo > 1e-10 * hi)) continue;  // rejected below; keep scanning

    const Eigen::MatrixXcd& U = es.eigenvectors();
    double prod = 1.0;
    for (int j = 0; j < n; ++j) prod *= lam[j];
    double root = std::pow(prod, 1.0 / (n - 1));
    // gamma: eigenvalues root/lam_j in the orthonormal coframe
    Eigen::VectorXd gj(n), lt(n);
    double inv_sum = 0.0;
    for (int j = 0; j < n; ++j) inv_sum += 1.0 / (fac * lam[j]);
    for (int j = 0; j < n; ++j) {
      gj[j] = root / lam[j];
      lt[j] = 1.0 / (inv_sum - 1.0 / (fac * lam[j]));
    }
    Eigen::MatrixXcd back = fc.M.transpose().eval();
    Hg[x] = back * (U * gj.asDiagonal() * U.adjoint()) * fc.M.conjugate();
    // rho = star_w Lambda: ortho matrix equals the ortho hat matrix itself
    Hr[x] = back * (fac * (U * lam.asDiagonal() * U.adjoint())) * fc.M.conjugate();
    Hlt[x] = back * (U * lt.asDiagonal() * U.adjoint()) * fc.M.conjugate();
    st.Cval.at(0, x) = root;  // det of gamma over det w in the ortho coframe
  }
  if (!(worst_ratio > 1e-10)) {
    std::string msg = "make_ma_state: Lambda not positive at grid point " +
                      std::to_string(worst_x) + " (min eigenvalue " +
                      std::to_string(worst_min) + ")";
    throw positivity_error(msg, worst_min);
  }
  // pointwise data varies with phi even over a constant background
  st.gamma = MetricField::variable(g, std::move(Hg));
  st.rho = MetricField::variable(g, std::move(Hr));
  st.lambda_tilde = MetricField::variable(g, std::move(Hlt));
  return st;
}

inline const FormField& ma_value(const MAState& st) { return st.Cval; }

// (rho, lambda, lambda-tilde).  lambda is recovered from lambda-tilde by the
// exact scaling lambda = c * lambda-tilde with
// c^{n-1} = 1 / ((n-1)! * det_w(lambda-tilde)).
inline std::tuple<MetricField, MetricField, MetricField> rho_lambda_tilde(
    const MAState& st) {
  const TorusGrid& g = st.w.grid();
  int n = g.n;
  long m = g.npoints();
  double fac = double(factorial(n - 1));
  std::vector<Eigen::MatrixXcd> Hl(m);
  for (long x = 0; x < m; ++x) {
    double det_w = st.w.frame(x).detH;
    double det_lt = st.lambda_tilde.H(x).determinant().real() / det_w;
    double c = std::pow(fac * det_lt, -1.0 / (n - 1));
    Hl[x] = c * st.lambda_tilde.H(x);
  }
  return {st.rho, MetricField::variable(g, std::move(Hl)), st.lambda_tilde};
}

// Invariant-formula route to (lambda, lambda-tilde), built from generic
// pointwise operations; the dual-path oracle for the eigenframe route above.
inline std::pair<MetricField, MetricField> lambda_invariant(const MAState& st) {
  const TorusGrid& g = st.w.grid();
  int n = g.n;
  long m = g.npoints();
  double fac = double(factorial(n - 1));
  std::vector<Eigen::MatrixXcd> Hl(m), Hlt(m);
  for (long x = 0; x < m; ++x) {
    MetricPoint wp = st.w.at(x);
    FrameChange fc = frame_change_of(st.w.frame(x));
    MetricPoint rp = st.rho.at(x);
    double lam_rho_w = rp.H.partialPivLu().solve(wp.H).trace().real();
    double det_ratio = std::pow(
        (wp.H.determinant() / rp.H.determinant()).real(), 1.0 / (n - 1));
    PointForm wn1 = wedge_power(wp.form(), n - 1);
    // the root here is normalized so that cof(sigma) = hat(star rho), i.e.
    // sigma^{n-1} = (n-1)! * star rho in the literal wedge-power convention
    PointForm star_rho = hodge_star(fc, rp.form());
    MetricPoint sigma = root_n_minus_1(wp, cplx(fac) * star_rho);
    PointForm star_sigma = hodge_star(fc, sigma.form());
    PointForm bracket = cplx(lam_rho_w / fac) * wn1 -
                        cplx(det_ratio) * star_sigma;
    MetricPoint lp = root_n_minus_1(wp, bracket);
    double det_l = (lp.H.determinant() / wp.H.determinant()).real();
    Hl[x] = lp.H;
    Hlt[x] = lp.H / (fac * det_l);
  }
  return {MetricField::variable(g, std::move(Hl)),
          MetricField::variable(g, std::move(Hlt))};
}

// First variation of Lambda in the direction h (same shape as lambda_of_phi
// minus the background term).
inline FormField lambda_variation(const MAState& st, const FormField& h) {
  FormField dL = wedge_field(cplx(0, 1) * ddbar(h), st.wn2);
  FormField t = wedge_field(del(h), st.dbar_wn2);
  t -= wedge_field(dbar(h), st.del_wn2);
  t *= cplx(0, 0.5);
  dL += t;
  return dL;
}

// (d_phi C)(h) = C(phi) * (1/(n-1)) * tr_{gamma^{n-1}}(dLambda(h)).
inline FormField linearize_apply(const MAState& st, const FormField& h) {
  const TorusGrid& g = st.w.grid();
  int n = g.n;
  FormField dL = lambda_variation(st, h);
  FormField out(g, 0, 0);
  long m = g.npoints();
  for (long x = 0; x < m; ++x) {
    cplx tr = (*st.hat_lu)[x].solve(hat_matrix(dL.point(x))).trace();
    out.at(0, x) = st.Cval.at(0, x).real() * tr.real() / double(n - 1);
  }
  return out;
}

// Second-order part: (n-2)!/(n-1) * tr_{lambda-tilde}(i del dbar h), cross-
// checked against the split form (n-1)!/(n-1)^2 * ((tr_rho w) lap_w - lap_rho).
inline FormField principal_part_apply(const MAState& st, const FormField& h) {
  const TorusGrid& g = st.w.grid();
  int n = g.n;
  long m = g.npoints();
  FormField dd = ddbar(h);
  FormField out(g, 0, 0);
  double c1 = double(factorial(n - 2)) / (n - 1);
  double c2 = double(factorial(n - 1)) / double((n - 1) * (n - 1));
  double max_diff = 0.0, scale = 0.0;
  Eigen::MatrixXcd A(n, n);
  for (long x = 0; x < m; ++x) {
    PointForm d = dd.point(x);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        A(j, k) = d.at(mask_t(1) << j, mask_t(1) << k);
    double t_lt = st.lambda_tilde.H(x).partialPivLu().solve(A).trace().real();
    double t_w = st.w.H(x).partialPivLu().solve(A).trace().real();
    Eigen::PartialPivLU<Eigen::MatrixXcd> rlu(st.rho.H(x));
    double t_rho = rlu.solve(A).trace().real();
    double lam_rho_w = rlu.solve(st.w.H(x)).trace().real();
    double f1 = c1 * t_lt;
    double f2 = c2 * (lam_rho_w * t_w - t_rho);
    max_diff = std::max(max_diff, std::abs(f1 - f2));
    scale = std::max({scale, std::abs(f1), std::abs(f2)});
    out.at(0, x) = f1;
  }
  if (max_diff > 1e-9 * std::max(scale, 1e-30))
    throw solver_error("principal_part_apply: split forms disagree", max_diff);
  return out;
}

}  // namespace gauduchon
