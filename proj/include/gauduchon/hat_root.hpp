#pragma once

// The hat basis of (n-1,n-1)-forms, coefficient-matrix extraction, the
// (n-1)-st root of a positive (n-1,n-1)-form, and the relative traces built
// on it.  The hat monomial Hat(j,k) is the unique multiple of
// dz_{^j} ^ dzbar_{^k} with  Hat(j,k) ^ (i dz_a ^ dzbar_b) = delta_ja
// delta_kb dV_id, which makes coefficient extraction a pure wedge pairing.

#include "gauduchon/hodge_star.hpp"

namespace gauduchon {

// Coefficient t with Hat(j,k) = t * e_{full\j, full\k}.
inline cplx hat_unit(int n, int j, int k) {
  mask_t full = (mask_t(1) << n) - 1;
  mask_t Jc = full & ~(mask_t(1) << j), Kc = full & ~(mask_t(1) << k);
  double s = ((n - 1) % 2 ? -1.0 : 1.0) * merge_sign(Jc, mask_t(1) << j) *
             merge_sign(Kc, mask_t(1) << k);
  return top_unit(n) / (cplx(0, 1) * s);
}

// Coefficient matrix A of an (n-1,n-1)-form over the hat basis (ambient frame).
inline Eigen::MatrixXcd hat_matrix(const PointForm& G) {
  int n = G.n();
  if (G.p() != n - 1 || G.q() != n - 1)
    throw degree_error("hat_matrix: expected bidegree (n-1,n-1)");
  mask_t full = (mask_t(1) << n) - 1;
  Eigen::MatrixXcd A(n, n);
  // Pairing with i dz_j ^ dzbar_k recovers the (k,j) entry in the orientation
  // that matches (1,1) coefficient matrices (so hat(gamma^{n-1})/(n-1)! is the
  // cofactor matrix of H_gamma, not its transpose).
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      mask_t Jc = full & ~(mask_t(1) << j), Kc = full & ~(mask_t(1) << k);
      A(k, j) = G.at(Jc, Kc) / hat_unit(n, j, k);
    }
  return A;
}

inline PointForm from_hat_matrix(int n, const Eigen::MatrixXcd& A) {
  mask_t full = (mask_t(1) << n) - 1;
  PointForm G(n, n - 1, n - 1);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      mask_t Jc = full & ~(mask_t(1) << j), Kc = full & ~(mask_t(1) << k);
      G.at(Jc, Kc) = A(k, j) * hat_unit(n, j, k);
    }
  return G;
}

// Hermitian eigen-data of Gamma/(n-1)! in the w0-orthonormal coframe; the
// positivity test of an (n-1,n-1)-form lives here.
struct HatEigen {
  Eigen::MatrixXcd U;
  Eigen::VectorXd lam;
};

inline HatEigen hat_eigen(const FrameChange& fc, const PointForm& G) {
  Eigen::MatrixXcd A = hat_matrix(to_orthonormal(fc, G));
  double drift = (A - A.adjoint()).norm();
  if (drift > 1e-9 * std::max(1.0, A.norm()))
    throw degree_error("hat_matrix: form is not real");
  A = 0.5 * (A + A.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A / double(factorial(G.n() - 1)));
  return {es.eigenvectors(), es.eigenvalues()};
}

// gamma with gamma^{n-1} = Gamma; independent of the background w0.
inline MetricPoint root_n_minus_1(const MetricPoint& w0, const PointForm& G) {
  int n = G.n();
  FrameChange fc(w0);
  HatEigen he = hat_eigen(fc, G);
  double hi = he.lam.maxCoeff();
  if (!(he.lam.minCoeff() > 1e-12 * std::max(hi, 1.0)))
    throw positivity_error("root_n_minus_1: form not positive", he.lam.minCoeff());
  double prod = 1.0;
  for (int j = 0; j < n; ++j) prod *= he.lam[j];
  double root = std::pow(prod, 1.0 / (n - 1));
  Eigen::VectorXd g(n);
  for (int j = 0; j < n; ++j) g[j] = root / he.lam[j];
  Eigen::MatrixXcd Go = he.U * g.asDiagonal() * he.U.adjoint();
  // (1,1)-form i sum Go_jk zeta_j ^ zetabar_k, pushed back to the ambient frame
  PointForm f = from_orthonormal(fc, MetricPoint(Go).form());
  return MetricPoint::from_form(f);
}

// Both sides of det(Gamma^{1/(n-1)}) = (det Gamma)^{1/(n-1)} / ((n-1)!)^{n/(n-1)}
// evaluated in the w0-orthonormal coframe.
inline std::pair<double, double> det_relation_check(const MetricPoint& w0,
                                                    const PointForm& G) {
  int n = G.n();
  FrameChange fc(w0);
  MetricPoint root = root_n_minus_1(w0, G);
  // root's matrix in the orthonormal coframe
  PointForm ro = to_orthonormal(fc, root.form());
  double lhs = MetricPoint::from_form(ro).H.determinant().real();
  double detG = hat_matrix(to_orthonormal(fc, G)).determinant().real();
  double rhs = std::pow(detG, 1.0 / (n - 1)) /
               std::pow((double)factorial(n - 1), double(n) / (n - 1));
  return {lhs, rhs};
}

// tr(A^{-1} A') over hat-coefficient matrices in a fixed w0-orthonormal coframe.
inline cplx trace_relative(const PointForm& G, const PointForm& Gp,
                           const MetricPoint& w0) {
  FrameChange fc(w0);
  Eigen::MatrixXcd A = hat_matrix(to_orthonormal(fc, G));
  Eigen::MatrixXcd Ap = hat_matrix(to_orthonormal(fc, Gp));
  return A.partialPivLu().solve(Ap).trace();
}

inline cplx trace_relative(const PointForm& G, const PointForm& Gp) {
  Eigen::MatrixXcd A = hat_matrix(G);
  Eigen::MatrixXcd Ap = hat_matrix(Gp);
  return A.partialPivLu().solve(Ap).trace();
}

// Lefschetz contraction: on (1,1)-forms the trace w.r.t. omega.
inline double lefschetz_contract(const MetricPoint& w, const PointForm& a) {
  if (a.p() != 1 || a.q() != 1)
    throw degree_error("lefschetz_contract: expected (1,1)");
  int n = a.n();
  Eigen::MatrixXcd am(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      am(j, k) = a.at(mask_t(1) << j, mask_t(1) << k) / cplx(0, 1);
  return w.H.partialPivLu().solve(am).trace().real();
}

// alpha = alpha_prim + s*omega with s = (tr_w alpha)/n.
inline std::pair<PointForm, double> lefschetz_decompose_11(const MetricPoint& w,
                                                           const PointForm& a) {
  double s = lefschetz_contract(w, a) / a.n();
  PointForm prim = a - cplx(s) * w.form();
  return {prim, s};
}

// ---- n x n fast paths -------------------------------------------------
// Under a coframe substitution dz = A zeta the hat matrix transforms by
// hat' = |det A|^2 conj(A)^{-1} hat conj(A)^{-H}; with A = fc.M_inv this is
// (1/det H) conj(M) hat conj(M)^H.  Together with star(Hat(j,k)) =
// i zeta_j ^ zetabar_k in an orthonormal coframe, every pointwise operation
// on (n-1,n-1)-forms reduces to n x n matrix algebra.

inline Eigen::MatrixXcd mat11_of(const PointForm& a) {
  int n = a.n();
  Eigen::MatrixXcd m(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      m(j, k) = a.at(mask_t(1) << j, mask_t(1) << k) / cplx(0, 1);
  return m;
}

inline PointForm form11_of(const Eigen::MatrixXcd& m) {
  int n = (int)m.rows();
  PointForm a(n, 1, 1);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      a.at(mask_t(1) << j, mask_t(1) << k) = cplx(0, 1) * m(j, k);
  return a;
}

inline Eigen::MatrixXcd hat_to_orthonormal(const FrameChange& fc, double detH,
                                           const Eigen::MatrixXcd& hat_amb) {
  Eigen::MatrixXcd Mc = fc.M.conjugate();
  return (Mc * hat_amb * Mc.adjoint()) / detH;
}

// star_w of an (n-1,n-1)-form, given its ambient hat matrix, as the ambient
// (1,1) coefficient matrix.
inline Eigen::MatrixXcd star_hat_fast(const FrameChange& fc, double detH,
                                      const Eigen::MatrixXcd& hat_amb) {
  Eigen::MatrixXcd ho = hat_to_orthonormal(fc, detH, hat_amb);
  return fc.M.transpose() * ho * fc.M.conjugate();
}

// Root from the ambient hat matrix; returns the ambient (1,1) matrix of gamma.
inline Eigen::MatrixXcd root_hat_fast(const FrameChange& fc, double detH,
                                      const Eigen::MatrixXcd& hat_amb, int n) {
  Eigen::MatrixXcd ho = hat_to_orthonormal(fc, detH, hat_amb) /
                        double(factorial(n - 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (ho + ho.adjoint().eval()));
  double hi = es.eigenvalues().maxCoeff();
  if (!(es.eigenvalues().minCoeff() > 1e-12 * std::max(hi, 1.0)))
    throw positivity_error("root_hat_fast: form not positive",
                           es.eigenvalues().minCoeff());
  double prod = 1.0;
  for (int j = 0; j < n; ++j) prod *= es.eigenvalues()[j];
  double root = std::pow(prod, 1.0 / (n - 1));
  Eigen::VectorXd gj(n);
  for (int j = 0; j < n; ++j) gj[j] = root / es.eigenvalues()[j];
  Eigen::MatrixXcd go = es.eigenvectors() * gj.asDiagonal() * es.eigenvectors().adjoint();
  return fc.M.transpose() * go * fc.M.conjugate();
}

// Both sides of tr_g(star_g Gamma) = <g, star_w Gamma>_w / (g^n/w^n).
inline std::pair<double, double> trace_star_two_metrics(const MetricPoint& w,
                                                        const MetricPoint& g,
                                                        const PointForm& G) {
  double lhs = lefschetz_contract(g, hodge_star(g, G));
  double ratio = (g.H.determinant() / w.H.determinant()).real();
  double rhs = inner_product(w, g.form(), hodge_star(w, G)).real() / ratio;
  return {lhs, rhs};
}

}  // namespace gauduchon
