#pragma once

// Right-preconditioned restarted GMRES on plain complex coefficient vectors.
// Used wherever the preconditioner is only approximately self-adjoint in the
// operator's inner product (variable-metric Green operators, the bordered
// Newton systems), where CG would stall.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "gauduchon/point_form.hpp"

namespace gauduchon {

using VecOp = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

struct KrylovResult {
  Eigen::VectorXcd x;
  double rel_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline KrylovResult gmres(const VecOp& A, const VecOp& Minv,
                          const Eigen::VectorXcd& b, double tol, int max_iter,
                          int restart = 50) {
  KrylovResult res;
  double nb = b.norm();
  res.x = Eigen::VectorXcd::Zero(b.size());
  if (nb == 0) {
    res.converged = true;
    return res;
  }
  Eigen::VectorXcd x = res.x;
  int total = 0;
  while (total < max_iter) {
    Eigen::VectorXcd r = b - A(x);
    double beta = r.norm();
    res.rel_residual = beta / nb;
    if (res.rel_residual < tol) {
      res.converged = true;
      break;
    }
    int m = std::min(restart, max_iter - total);
    std::vector<Eigen::VectorXcd> V, Z;
    V.push_back(r / beta);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(m + 1);
    g[0] = beta;
    std::vector<cplx> cs(m), sn(m);
    int k = 0;
    for (; k < m; ++k) {
      Z.push_back(Minv ? Minv(V[k]) : V[k]);
      Eigen::VectorXcd wv = A(Z[k]);
      for (int i = 0; i <= k; ++i) {
        H(i, k) = V[i].dot(wv);
        wv -= H(i, k) * V[i];
      }
      double hnext = wv.norm();
      if (k + 1 < m && hnext > 0) V.push_back(wv / hnext);
      H(k + 1, k) = hnext;
      // apply stored Givens rotations
      for (int i = 0; i < k; ++i) {
        cplx t = std::conj(cs[i]) * H(i, k) + std::conj(sn[i]) * H(i + 1, k);
        H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
        H(i, k) = t;
      }
      double denom = std::sqrt(std::norm(H(k, k)) + std::norm(H(k + 1, k)));
      if (denom == 0) {
        cs[k] = 1;
        sn[k] = 0;
      } else {
        cs[k] = H(k, k) / denom;
        sn[k] = H(k + 1, k) / denom;
      }
      H(k, k) = std::conj(cs[k]) * H(k, k) + std::conj(sn[k]) * H(k + 1, k);
      H(k + 1, k) = 0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = std::conj(cs[k]) * g[k];
      ++total;
      if (std::abs(g[k + 1]) / nb < tol || hnext == 0) {
        ++k;
        break;
      }
    }
    // back substitution on the k x k triangle
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(k);
    for (int i = k - 1; i >= 0; --i) {
      cplx s = g[i];
      for (int j = i + 1; j < k; ++j) s -= H(i, j) * y[j];
      y[i] = s / H(i, i);
    }
    for (int i = 0; i < k; ++i) x += y[i] * Z[i];
  }
  if (!res.converged) {
    Eigen::VectorXcd r = b - A(x);
    res.rel_residual = r.norm() / nb;
    res.converged = res.rel_residual < tol;
  }
  res.x = x;
  res.iterations = total;
  return res;
}

}  // namespace gauduchon
