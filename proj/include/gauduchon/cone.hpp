#pragma once

// Diagnostics around the cone of Gauduchon classes: the map [Omega]_A ->
// [del Omega]_dbar and its defect, Aeppli-harmonic representatives,
// reconstruction of a Gauduchon metric from a nearby harmonic class, and the
// conformal Gauduchon normalization of an arbitrary metric.

#include "gauduchon/hodge.hpp"

namespace gauduchon {

// Relative size of del dbar (w^{n-1}); zero for Gauduchon metrics.
inline double gauduchon_residual(const MetricField& w) {
  FormField wn1 = wedge_power_field(w.form(), w.n() - 1);
  return ddbar(wn1).max_abs() / std::max(wn1.max_abs(), 1e-300);
}

// Pointwise (n-1)-st root of a positive (n-1,n-1)-form field; scans the whole
// grid before rejecting so the error reports the worst point.
inline MetricField metric_root_field(const MetricField& w,
                                     const FormField& Gamma) {
  const TorusGrid& g = w.grid();
  int n = g.n;
  long m = g.npoints();
  double fac = double(factorial(n - 1));
  std::vector<Eigen::MatrixXcd> Hs(m);
  double worst_ratio = std::numeric_limits<double>::max(), worst_min = 0.0;
  long worst_x = -1;
  for (long x = 0; x < m; ++x) {
    const Frame& fr = w.frame(x);
    FrameChange fc = frame_change_of(fr);
    Eigen::MatrixXcd ho =
        hat_to_orthonormal(fc, fr.detH, hat_matrix(Gamma.point(x))) / fac;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        0.5 * (ho + ho.adjoint().eval()));
    const Eigen::VectorXd& lam = es.eigenvalues();
    double hi = lam.maxCoeff(), lo = lam.minCoeff();
    double ratio = lo / std::max(hi, 1e-300);
    if (ratio < worst_ratio) {
      worst_ratio = ratio;
      worst_min = lo;
      worst_x = x;
    }
    if (!(lo > 1e-10 * hi)) continue;
    double prod = 1.0;
    for (int j = 0; j < n; ++j) prod *= lam[j];
    double root = std::pow(prod, 1.0 / (n - 1));
    Eigen::VectorXd gj(n);
    for (int j = 0; j < n; ++j) gj[j] = root / lam[j];
    Hs[x] = fc.M.transpose() *
            (es.eigenvectors() * gj.asDiagonal() * es.eigenvectors().adjoint()) *
            fc.M.conjugate();
  }
  if (!(worst_ratio > 1e-10)) {
    std::string msg = "metric_root_field: form not positive at grid point " +
                      std::to_string(worst_x) + " (min eigenvalue " +
                      std::to_string(worst_min) + ")";
    throw positivity_error(msg, worst_min);
  }
  return MetricField::variable(g, std::move(Hs));
}

// L2 norm of the Dolbeault-harmonic projection of del Omega; zero iff the
// class of Omega maps to zero, the strongly-Gauduchon condition.
inline double t_map_defect(const MetricField& w, const FormField& Om) {
  if (ddbar(Om).max_abs() > 1e-8 * (Om.max_abs() + 1.0))
    throw config_error("t_map_defect: input is not del-dbar-closed");
  FormField dOm = del(Om);
  FormField h = harmonic_project(LaplacianKind::Dolbeault, w, dOm);
  return l2_norm(w, h);
}

struct AeppliClassRep {
  FormField rep;     // Aeppli-harmonic
  FormField source;  // the input representative
};

inline AeppliClassRep aeppli_harmonic_rep(const MetricField& w,
                                          const FormField& G) {
  if (ddbar(G).max_abs() > 1e-8 * (G.max_abs() + 1.0))
    throw config_error("aeppli_harmonic_rep: input is not del-dbar-closed");
  return {harmonic_project(LaplacianKind::Aeppli, w, G), G};
}

// Move the exact part of w^{n-1} onto a nearby harmonic target class and take
// the root: a Gauduchon metric whose class is represented by alpha.
inline MetricField gauduchon_reconstruct(const MetricField& w,
                                         const FormField& alpha) {
  FormField wn1 = wedge_power_field(w.form(), w.n() - 1);
  ThreeSpace ts = three_space_decompose(LaplacianKind::Aeppli, w, wn1);
  FormField Gamma = alpha + ts.e;
  return metric_root_field(w, Gamma);
}

namespace detail {

// psi -> flattened del dbar (psi * wn1), and its plain adjoint chain.
inline Eigen::VectorXcd normalize_forward(const FormField& wn1,
                                          const Eigen::VectorXcd& psi) {
  FormField G = wn1;
  long m = G.npoints();
  for (int c = 0; c < G.ncoeff(); ++c) {
    cplx* p = G.plane(c);
    for (long x = 0; x < m; ++x) p[x] *= psi[x];
  }
  return ddbar(G).data();
}

}  // namespace detail

// Conformal factor psi > 0 with del dbar (psi * w0^{n-1}) = 0: the defect
// operator is a square second-order map on scalars, solved for psi = 1 + u by
// GMRES preconditioned with its Fourier symbol over the averaged constant
// metric.  The scale is fixed by mean(psi) = 1.
inline MetricField gauduchon_normalize(const MetricField& w0,
                                       double tol = 1e-12,
                                       int max_iter = 800) {
  if (w0.is_constant()) return w0;  // psi = 1
  if (gauduchon_residual(w0) < 1e-10) return w0;  // psi = 1 already
  const TorusGrid& g = w0.grid();
  int n = g.n;
  long m = g.npoints();
  FormField wn1 = wedge_power_field(w0.form(), n - 1);
  VecOp E = [&](const Eigen::VectorXcd& psi) {
    return detail::normalize_forward(wn1, psi);
  };
  Eigen::MatrixXcd Havg = Eigen::MatrixXcd::Zero(n, n);
  for (long x = 0; x < m; ++x) Havg += w0.H(x);
  Havg /= double(m);
  Eigen::VectorXcd svec =
      wedge_power(MetricPoint(Havg).form(), n - 1).coeffs();
  const auto& syms = dz_symbols(g);
  Eigen::VectorXcd dsym(m);
  for (long x = 0; x < m; ++x) {
    std::array<cplx, 8> s{};
    for (int j = 0; j < n; ++j) s[j] = syms[j][x];
    dsym[x] = (detail::mode_half_d(n, n - 1, n, s, false) *
               detail::mode_half_d(n, n - 1, n - 1, s, true) * svec)(0);
  }
  double floor_ = 1e-6 * dsym.cwiseAbs().maxCoeff();
  VecOp P = [&](const Eigen::VectorXcd& r) {
    Eigen::VectorXcd z = r;
    Fft::instance().forward(g, z.data());
    for (long x = 0; x < m; ++x)
      z[x] /= (std::abs(dsym[x]) > floor_ ? dsym[x] : cplx(floor_));
    Fft::instance().backward(g, z.data());
    return z;
  };

  KrylovResult kr = gmres(E, P, -E(Eigen::VectorXcd::Ones(m)), tol, max_iter);
  if (!kr.converged)
    throw solver_error("gauduchon_normalize: no convergence", kr.rel_residual);
  const Eigen::VectorXcd& u = kr.x;
  // psi = 1 + u, real and positive, mean one
  double imag_top = 0.0, lo = std::numeric_limits<double>::max(), mean = 0.0;
  for (long x = 0; x < m; ++x) {
    imag_top = std::max(imag_top, std::abs(u[x].imag()));
    lo = std::min(lo, 1.0 + u[x].real());
    mean += 1.0 + u[x].real();
  }
  mean /= double(m);
  if (imag_top > 1e-9)
    throw solver_error("gauduchon_normalize: conformal factor not real",
                       imag_top);
  if (!(lo > 0))
    throw solver_error("gauduchon_normalize: conformal factor not positive",
                       lo);
  std::vector<Eigen::MatrixXcd> Hs(m);
  for (long x = 0; x < m; ++x) {
    double psi = (1.0 + u[x].real()) / mean;
    Hs[x] = std::pow(psi, 1.0 / (n - 1)) * w0.H(x);
  }
  MetricField gamma = MetricField::variable(g, std::move(Hs));
  double res = gauduchon_residual(gamma);
  if (res > 1e-8)
    throw solver_error("gauduchon_normalize: residual above tolerance", res);
  return gamma;
}

}  // namespace gauduchon
