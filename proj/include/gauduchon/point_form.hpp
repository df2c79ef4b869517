#pragma once

// PointForm: coefficients of a (p,q)-form at one point over the
// dz_I ^ dzbar_J basis.  Powers of i are never baked into the basis; callers
// carry them in the coefficients.

#include <complex>
#include <Eigen/Dense>

#include "gauduchon/multi_index.hpp"

namespace gauduchon {

using cplx = std::complex<double>;

// Cached index tables for one (n, p): masks in basis order plus the inverse map.
struct DegreeBasis {
  std::vector<mask_t> masks;
  std::vector<int> pos;  // pos[mask] = index in `masks`, -1 otherwise

  DegreeBasis() = default;
  DegreeBasis(int n, int p) : masks(subsets(n, p)), pos(std::size_t(1) << n, -1) {
    for (int i = 0; i < (int)masks.size(); ++i) pos[masks[i]] = i;
  }
};

inline const DegreeBasis& degree_basis(int n, int p) {
  static DegreeBasis cache[kMaxDim + 1][kMaxDim + 1];
  DegreeBasis& b = cache[n][p];
  if (b.pos.empty()) b = DegreeBasis(n, p);
  return b;
}

class PointForm {
 public:
  PointForm() = default;
  PointForm(int n, int p, int q)
      : n_(n), p_(p), q_(q),
        c_(Eigen::VectorXcd::Zero(binomial(n, p) * binomial(n, q))) {
    if (p < 0 || q < 0 || p > n || q > n)
      throw degree_error("bidegree out of range");
  }

  int n() const { return n_; }
  int p() const { return p_; }
  int q() const { return q_; }
  int size() const { return (int)c_.size(); }
  int nanti() const { return (int)degree_basis(n_, q_).masks.size(); }

  Eigen::VectorXcd& coeffs() { return c_; }
  const Eigen::VectorXcd& coeffs() const { return c_; }

  int flat_index(mask_t holo, mask_t anti) const {
    return degree_basis(n_, p_).pos[holo] * nanti() +
           degree_basis(n_, q_).pos[anti];
  }
  cplx& at(mask_t holo, mask_t anti) { return c_[flat_index(holo, anti)]; }
  cplx at(mask_t holo, mask_t anti) const { return c_[flat_index(holo, anti)]; }

  PointForm& operator+=(const PointForm& o) { c_ += o.c_; return *this; }
  PointForm& operator-=(const PointForm& o) { c_ -= o.c_; return *this; }
  PointForm& operator*=(cplx s) { c_ *= s; return *this; }
  friend PointForm operator+(PointForm a, const PointForm& b) { return a += b; }
  friend PointForm operator-(PointForm a, const PointForm& b) { return a -= b; }
  friend PointForm operator*(cplx s, PointForm a) { return a *= s; }

  double norm() const { return c_.norm(); }

 private:
  int n_ = 0, p_ = 0, q_ = 0;
  Eigen::VectorXcd c_;
};

// Conjugation: (p,q) -> (q,p), c'(I,J) = (-1)^{|I||J|} conj(c(J,I)).
inline PointForm conj_form(const PointForm& u) {
  PointForm r(u.n(), u.q(), u.p());
  double sgn = (u.p() * u.q()) % 2 ? -1.0 : 1.0;
  const auto& holo = degree_basis(u.n(), u.q()).masks;
  const auto& anti = degree_basis(u.n(), u.p()).masks;
  for (mask_t I : holo)
    for (mask_t J : anti) r.at(I, J) = sgn * std::conj(u.at(J, I));
  return r;
}

inline bool is_real_form(const PointForm& u, double tol = 1e-12) {
  if (u.p() != u.q()) return false;
  PointForm d = u - conj_form(u);
  double scale = u.norm();
  return d.norm() <= tol * (scale > 0 ? scale : 1.0);
}

}  // namespace gauduchon
