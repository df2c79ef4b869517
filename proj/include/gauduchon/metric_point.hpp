#pragma once

// MetricPoint: a positive (1,1)-form i * sum H_jk dz_j ^ dzbar_k at one point,
// plus the coframe change diagonalizing it.

#include <Eigen/Dense>

#include "gauduchon/point_form.hpp"

namespace gauduchon {

struct MetricPoint {
  Eigen::MatrixXcd H;

  MetricPoint() = default;
  explicit MetricPoint(Eigen::MatrixXcd H_) : H(std::move(H_)) {
    double drift = (H - H.adjoint()).norm();
    if (drift > 1e-12 * std::max(1.0, H.norm()))
      throw metric_error("metric matrix not Hermitian");
    H = 0.5 * (H + H.adjoint().eval());  // renormalize symmetrization drift
  }

  int n() const { return (int)H.rows(); }

  static MetricPoint identity(int n) {
    return MetricPoint(Eigen::MatrixXcd::Identity(n, n));
  }

  // The (1,1)-form itself: coefficient of dz_j ^ dzbar_k is i*H_jk.
  PointForm form() const {
    int nn = n();
    PointForm f(nn, 1, 1);
    for (int j = 0; j < nn; ++j)
      for (int k = 0; k < nn; ++k)
        f.at(mask_t(1) << j, mask_t(1) << k) = cplx(0, 1) * H(j, k);
    return f;
  }

  static MetricPoint from_form(const PointForm& f, double tol = 1e-10) {
    int nn = f.n();
    Eigen::MatrixXcd H(nn, nn);
    for (int j = 0; j < nn; ++j)
      for (int k = 0; k < nn; ++k)
        H(j, k) = f.at(mask_t(1) << j, mask_t(1) << k) / cplx(0, 1);
    double drift = (H - H.adjoint().eval()).norm();
    if (drift > tol * std::max(1.0, H.norm()))
      throw metric_error("form is not real (1,1)");
    return MetricPoint(0.5 * (H + H.adjoint().eval()));
  }
};

// Coframe change to an omega-orthonormal coframe zeta = M dz.
// B = conj(inverse(M)) satisfies B^H H B = identity.
struct FrameChange {
  Eigen::MatrixXcd M;      // zeta = M dz
  Eigen::MatrixXcd M_inv;  // dz = M_inv zeta
  Eigen::MatrixXcd B;      // spec-normal form of the change; B^H H B = I
  cplx detB;

  FrameChange() = default;

  explicit FrameChange(const MetricPoint& w) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(w.H);
    double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if (!(lo > 1e-12 * std::max(hi, 1.0)))
      throw metric_error("metric not positive definite");
    Eigen::VectorXd sq = es.eigenvalues().cwiseSqrt();
    const Eigen::MatrixXcd& V = es.eigenvectors();
    M = sq.asDiagonal().toDenseMatrix().cast<cplx>() * V.transpose();
    M_inv = V.conjugate() * sq.cwiseInverse().asDiagonal().toDenseMatrix().cast<cplx>();
    B = M_inv.conjugate();
    detB = B.determinant();
  }
};

// Substitute dz = A zeta in a form given over the dz coframe:
// c'(K,L) = sum c(I,J) det(A[I,K]) det(conj(A)[J,L]).
inline cplx minor_det(const Eigen::MatrixXcd& A, mask_t rows, mask_t cols) {
  int k = popcount(rows);
  if (k == 0) return 1.0;
  Eigen::MatrixXcd S(k, k);
  int r = 0;
  for (int i = 0; i < kMaxDim; ++i) {
    if (!(rows & (mask_t(1) << i))) continue;
    int c = 0;
    for (int j = 0; j < kMaxDim; ++j) {
      if (!(cols & (mask_t(1) << j))) continue;
      S(r, c++) = A(i, j);
    }
    ++r;
  }
  return S.determinant();
}

inline PointForm coframe_substitute(const PointForm& u, const Eigen::MatrixXcd& A) {
  int n = u.n();
  PointForm r(n, u.p(), u.q());
  const auto& holo = degree_basis(n, u.p()).masks;
  const auto& anti = degree_basis(n, u.q()).masks;
  Eigen::MatrixXcd Ac = A.conjugate();
  for (mask_t I : holo)
    for (mask_t J : anti) {
      cplx c = u.at(I, J);
      if (c == cplx(0)) continue;
      for (mask_t K : holo)
        for (mask_t L : anti)
          r.at(K, L) += c * minor_det(A, I, K) * minor_det(Ac, J, L);
    }
  return r;
}

inline PointForm to_orthonormal(const FrameChange& fc, const PointForm& u) {
  return coframe_substitute(u, fc.M_inv);
}
inline PointForm from_orthonormal(const FrameChange& fc, const PointForm& u) {
  return coframe_substitute(u, fc.M);
}

}  // namespace gauduchon
