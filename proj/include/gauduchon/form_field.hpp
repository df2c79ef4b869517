#pragma once

// FormField: one complex plane per basis coefficient of a (p,q)-form, each
// plane contiguous over the grid (FFT-friendly).  MetricField: Hermitian
// matrix field with an optional constant fast path and a lazily built cache
// of per-point coframe changes.

#include <map>
#include <memory>

#include "gauduchon/fft.hpp"
#include "gauduchon/hat_root.hpp"

namespace gauduchon {

class FormField {
 public:
  FormField() = default;
  FormField(const TorusGrid& g, int p, int q)
      : grid_(g), p_(p), q_(q),
        ncoeff_(int(binomial(g.n, p) * binomial(g.n, q))),
        data_(Eigen::VectorXcd::Zero(ncoeff_ * g.npoints())) {}

  const TorusGrid& grid() const { return grid_; }
  int p() const { return p_; }
  int q() const { return q_; }
  int ncoeff() const { return ncoeff_; }
  long npoints() const { return grid_.npoints(); }

  cplx* plane(int c) { return data_.data() + c * npoints(); }
  const cplx* plane(int c) const { return data_.data() + c * npoints(); }

  Eigen::VectorXcd& data() { return data_; }
  const Eigen::VectorXcd& data() const { return data_; }

  cplx& at(int c, long x) { return data_[c * npoints() + x]; }
  cplx at(int c, long x) const { return data_[c * npoints() + x]; }

  PointForm point(long x) const {
    PointForm f(grid_.n, p_, q_);
    for (int c = 0; c < ncoeff_; ++c) f.coeffs()[c] = at(c, x);
    return f;
  }
  void set_point(long x, const PointForm& f) {
    for (int c = 0; c < ncoeff_; ++c) at(c, x) = f.coeffs()[c];
  }

  FormField& operator+=(const FormField& o) { data_ += o.data_; return *this; }
  FormField& operator-=(const FormField& o) { data_ -= o.data_; return *this; }
  FormField& operator*=(cplx s) { data_ *= s; return *this; }
  friend FormField operator+(FormField a, const FormField& b) { return a += b; }
  friend FormField operator-(FormField a, const FormField& b) { return a -= b; }
  friend FormField operator*(cplx s, FormField a) { return a *= s; }

  // plain coefficient l2 norm (metric-free diagnostic)
  double norm() const { return data_.norm(); }
  double max_abs() const { return data_.cwiseAbs().maxCoeff(); }

 private:
  TorusGrid grid_;
  int p_ = 0, q_ = 0, ncoeff_ = 0;
  Eigen::VectorXcd data_;
};

inline FormField conj_field(const FormField& F) {
  FormField r(F.grid(), F.q(), F.p());
  int n = F.grid().n;
  double sgn = (F.p() * F.q()) % 2 ? -1.0 : 1.0;
  const auto& holo = degree_basis(n, F.q()).masks;
  const auto& anti = degree_basis(n, F.p()).masks;
  PointForm u(n, F.p(), F.q()), v(n, F.q(), F.p());
  for (mask_t I : holo)
    for (mask_t J : anti) {
      int src = u.flat_index(J, I), dst = v.flat_index(I, J);
      long m = F.npoints();
      const cplx* in = F.plane(src);
      cplx* out = r.plane(dst);
      for (long x = 0; x < m; ++x) out[x] = sgn * std::conj(in[x]);
    }
  return r;
}

// Per-point coframe-change data for a metric field.
struct Frame {
  Eigen::MatrixXcd M, M_inv;
  double detH;
};

// Transform matrix T with (coeffs in orthonormal coframe) = T (ambient
// coeffs), for bidegree (p,q) at one point.
inline Eigen::MatrixXcd ortho_transform(const Frame& fr, int n, int p, int q) {
  PointForm probe(n, p, q);
  int sz = probe.size();
  Eigen::MatrixXcd T(sz, sz);
  for (int c = 0; c < sz; ++c) {
    PointForm e(n, p, q);
    e.coeffs()[c] = 1.0;
    T.col(c) = coframe_substitute(e, fr.M_inv).coeffs();
  }
  return T;
}

// Pointwise weight W = T^H T * det H (the matrix of <.,.>_w dV_w density).
inline Eigen::MatrixXcd gram_weight(const Frame& fr, int n, int p, int q) {
  Eigen::MatrixXcd T = ortho_transform(fr, n, p, q);
  return (T.adjoint() * T) * fr.detH;
}

class MetricField {
 public:
  MetricField() = default;

  static MetricField constant(const TorusGrid& g, const MetricPoint& w) {
    MetricField f;
    f.grid_ = g;
    f.constant_ = true;
    f.Hs_.push_back(w.H);
    return f;
  }

  static MetricField variable(const TorusGrid& g,
                              std::vector<Eigen::MatrixXcd> Hs) {
    MetricField f;
    f.grid_ = g;
    f.constant_ = false;
    f.Hs_ = std::move(Hs);
    for (const auto& H : f.Hs_) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
      if (!(es.eigenvalues().minCoeff() > 0))
        throw metric_error("metric field not positive definite");
    }
    return f;
  }

  const TorusGrid& grid() const { return grid_; }
  bool is_constant() const { return constant_; }
  int n() const { return grid_.n; }

  const Eigen::MatrixXcd& H(long x) const {
    return constant_ ? Hs_[0] : Hs_[x];
  }
  MetricPoint at(long x) const { return MetricPoint(H(x)); }

  const Frame& frame(long x) const {
    build_frames();
    return (*frames_)[constant_ ? 0 : x];
  }

  // the (1,1)-form field i sum H_jk dz_j ^ dzbar_k
  FormField form() const {
    FormField f(grid_, 1, 1);
    long m = grid_.npoints();
    for (long x = 0; x < m; ++x) f.set_point(x, at(x).form());
    return f;
  }

  // Cached pointwise Gram weights (and inverses) for one bidegree; shared by
  // copies of the field.  Returns nullptr when the cache would be too large,
  // in which case callers recompute per point.
  struct WeightPair {
    std::vector<Eigen::MatrixXcd> W, Winv;
  };
  const WeightPair* weights(int p, int q) const {
    if (constant_) return nullptr;  // constant path has its own fast lane
    long m = grid_.npoints();
    long sz = binomial(grid_.n, p) * binomial(grid_.n, q);
    if (m * sz * sz > (4L << 20)) return nullptr;
    auto key = std::make_pair(p, q);
    auto it = wcache_->find(key);
    if (it != wcache_->end()) return &it->second;
    WeightPair wp;
    wp.W.reserve(m);
    wp.Winv.reserve(m);
    for (long x = 0; x < m; ++x) {
      Eigen::MatrixXcd W = gram_weight(frame(x), grid_.n, p, q);
      wp.W.push_back(W);
      wp.Winv.push_back(W.ldlt().solve(
          Eigen::MatrixXcd::Identity(W.rows(), W.cols())));
    }
    return &wcache_->emplace(key, std::move(wp)).first->second;
  }

  double min_eigenvalue() const {
    double lo = std::numeric_limits<double>::max();
    long m = constant_ ? 1 : grid_.npoints();
    for (long x = 0; x < m; ++x) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Hs_[x]);
      lo = std::min(lo, es.eigenvalues().minCoeff());
    }
    return lo;
  }

 private:
  TorusGrid grid_;
  bool constant_ = true;
  std::vector<Eigen::MatrixXcd> Hs_;
  mutable std::shared_ptr<std::vector<Frame>> frames_;
  mutable std::shared_ptr<std::map<std::pair<int, int>, WeightPair>> wcache_ =
      std::make_shared<std::map<std::pair<int, int>, WeightPair>>();

  void build_frames() const {
    if (frames_) return;
    auto fr = std::make_shared<std::vector<Frame>>();
    long m = constant_ ? 1 : grid_.npoints();
    fr->reserve(m);
    for (long x = 0; x < m; ++x) {
      FrameChange fc{MetricPoint(Hs_[x])};
      fr->push_back({fc.M, fc.M_inv, Hs_[x].determinant().real()});
    }
    frames_ = fr;
  }
};

inline FrameChange frame_change_of(const Frame& f) {
  FrameChange fc;
  fc.M = f.M;
  fc.M_inv = f.M_inv;
  fc.B = f.M_inv.conjugate();
  fc.detB = fc.B.determinant();
  return fc;
}

}  // namespace gauduchon
