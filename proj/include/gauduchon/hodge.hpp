#pragma once

// Fourth-order Hodge theory on the torus: the Bott-Chern, Aeppli, del-delbar,
// Dolbeault and flat De Rham Laplacians, Green operators and harmonic
// projectors (exact per-Fourier-mode blocks for constant metrics, deflated CG
// for variable ones), three-space decompositions, and the constructive
// minimal-solution operators built on them.

#include <limits>
#include <map>
#include <random>

#include "gauduchon/differential.hpp"
#include "gauduchon/krylov.hpp"

namespace gauduchon {

enum class LaplacianKind { Dolbeault, BottChern, Aeppli, DdbarBar, DeRham };

// ---- generic composition (any metric) ---------------------------------

namespace detail {

inline bool deg_ok(int n, int p, int q) {
  return p >= 0 && q >= 0 && p <= n && q <= n;
}

}  // namespace detail

inline FormField laplacian_apply(LaplacianKind kind, const MetricField& w,
                                 const FormField& F) {
  const TorusGrid& g = F.grid();
  int n = g.n, p = F.p(), q = F.q();
  FormField acc(g, p, q);
  auto add = [&](const FormField& t) { acc += t; };
  bool up_p = detail::deg_ok(n, p + 1, q), up_q = detail::deg_ok(n, p, q + 1);
  bool dn_p = detail::deg_ok(n, p - 1, q), dn_q = detail::deg_ok(n, p, q - 1);
  bool up_pq = detail::deg_ok(n, p + 1, q + 1), dn_pq = detail::deg_ok(n, p - 1, q - 1);

  switch (kind) {
    case LaplacianKind::Dolbeault:
      if (up_q) add(dbar_adj(w, dbar(F)));
      if (dn_q) add(dbar(dbar_adj(w, F)));
      break;
    case LaplacianKind::DeRham:
      // valid for the constant (hence Kaehler) metrics it is used with
      if (up_p) add(del_adj(w, del(F)));
      if (up_q) add(dbar_adj(w, dbar(F)));
      if (dn_p) add(del(del_adj(w, F)));
      if (dn_q) add(dbar(dbar_adj(w, F)));
      break;
    case LaplacianKind::DdbarBar:
      if (up_pq) add(ddbar_adj(w, ddbar(F)));
      if (dn_pq) add(ddbar(ddbar_adj(w, F)));
      break;
    case LaplacianKind::BottChern:
      if (up_p) add(del_adj(w, del(F)));
      if (up_q) add(dbar_adj(w, dbar(F)));
      if (up_pq) add(ddbar_adj(w, ddbar(F)));
      if (dn_pq) add(ddbar(ddbar_adj(w, F)));
      // (del* dbar)* (del* dbar) = dbar* del (del* dbar)
      if (up_q && dn_p) add(dbar_adj(w, del(del_adj(w, dbar(F)))));
      // (del* dbar)(del* dbar)* = del* dbar dbar* del
      if (up_p && dn_q) add(del_adj(w, dbar(dbar_adj(w, del(F)))));
      break;
    case LaplacianKind::Aeppli:
      if (dn_p) add(del(del_adj(w, F)));
      if (dn_q) add(dbar(dbar_adj(w, F)));
      if (up_pq) add(ddbar_adj(w, ddbar(F)));
      if (dn_pq) add(ddbar(ddbar_adj(w, F)));
      // (del dbar*)(del dbar*)* = del dbar* dbar del*
      if (dn_p && up_q) {
        FormField t = del_adj(w, F);
        add(del(dbar_adj(w, dbar(t))));
      }
      // (del dbar*)*(del dbar*) = dbar del* del dbar*
      if (dn_q && up_p) add(dbar(del_adj(w, del(dbar_adj(w, F)))));
      break;
  }
  return acc;
}

// ---- per-mode machinery (constant metric) -----------------------------

namespace detail {

struct GramData {
  Eigen::MatrixXcd P, Pinv, Phalf, Phalf_inv;
};

// Gram matrices of the constant metric for every bidegree, built on demand.
class ConstGram {
 public:
  explicit ConstGram(const MetricField& w) : w_(w) {}

  const GramData& get(int p, int q) {
    auto key = std::make_pair(p, q);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    GramData d;
    d.P = gram_weight(w_.frame(0), w_.n(), p, q);
    d.P = 0.5 * (d.P + d.P.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(d.P);
    Eigen::VectorXd ev = es.eigenvalues();
    d.Pinv = es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
             es.eigenvectors().adjoint();
    d.Phalf = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
              es.eigenvectors().adjoint();
    d.Phalf_inv = es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
                  es.eigenvectors().adjoint();
    return cache_.emplace(key, std::move(d)).first->second;
  }

 private:
  const MetricField& w_;
  std::map<std::pair<int, int>, GramData> cache_;
};

// Matrix of del (bar=false) / dbar (bar=true) on one Fourier mode.
inline Eigen::MatrixXcd mode_half_d(int n, int p, int q,
                                    const std::array<cplx, 8>& s, bool bar) {
  PointForm in_l(n, p, q), out_l(n, p + (bar ? 0 : 1), q + (bar ? 1 : 0));
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(out_l.size(), in_l.size());
  const auto& holo = degree_basis(n, p).masks;
  const auto& anti = degree_basis(n, q).masks;
  for (mask_t I : holo)
    for (mask_t J : anti)
      for (int j = 0; j < n; ++j) {
        mask_t bj = mask_t(1) << j;
        if (!bar && (I & bj)) continue;
        if (bar && (J & bj)) continue;
        double sgn = bar ? ((p % 2 ? -1.0 : 1.0) * merge_sign(bj, J))
                         : merge_sign(bj, I);
        cplx sym = bar ? -std::conj(s[j]) : s[j];
        D(out_l.flat_index(bar ? I : (I | bj), bar ? (J | bj) : J),
          in_l.flat_index(I, J)) += sgn * sym;
      }
  return D;
}

// One mode's Laplacian block plus the similarity transform making it
// Hermitian: K = Phalf L Phalf_inv.
inline Eigen::MatrixXcd mode_laplacian(LaplacianKind kind, int n, int p, int q,
                                       const std::array<cplx, 8>& s,
                                       ConstGram& gram) {
  int d0 = (int)(binomial(n, p) * binomial(n, q));
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(d0, d0);
  auto adj = [&](const Eigen::MatrixXcd& T, int pi, int qi, int po, int qo) {
    return Eigen::MatrixXcd(gram.get(pi, qi).Pinv * T.adjoint() *
                            gram.get(po, qo).P);
  };
  auto del_m = [&](int pp, int qq) { return mode_half_d(n, pp, qq, s, false); };
  auto dbar_m = [&](int pp, int qq) { return mode_half_d(n, pp, qq, s, true); };
  bool up_p = deg_ok(n, p + 1, q), up_q = deg_ok(n, p, q + 1);
  bool dn_p = deg_ok(n, p - 1, q), dn_q = deg_ok(n, p, q - 1);
  bool up_pq = deg_ok(n, p + 1, q + 1), dn_pq = deg_ok(n, p - 1, q - 1);

  auto add_ddbar_terms = [&]() {
    if (up_pq) {
      Eigen::MatrixXcd DD = del_m(p, q + 1) * dbar_m(p, q);
      L += adj(DD, p, q, p + 1, q + 1) * DD;
    }
    if (dn_pq) {
      Eigen::MatrixXcd DD = del_m(p - 1, q) * dbar_m(p - 1, q - 1);
      L += DD * adj(DD, p - 1, q - 1, p, q);
    }
  };

  switch (kind) {
    case LaplacianKind::Dolbeault:
      if (up_q) {
        Eigen::MatrixXcd D = dbar_m(p, q);
        L += adj(D, p, q, p, q + 1) * D;
      }
      if (dn_q) {
        Eigen::MatrixXcd D = dbar_m(p, q - 1);
        L += D * adj(D, p, q - 1, p, q);
      }
      break;
    case LaplacianKind::DeRham:
      if (up_p) {
        Eigen::MatrixXcd D = del_m(p, q);
        L += adj(D, p, q, p + 1, q) * D;
      }
      if (up_q) {
        Eigen::MatrixXcd D = dbar_m(p, q);
        L += adj(D, p, q, p, q + 1) * D;
      }
      if (dn_p) {
        Eigen::MatrixXcd D = del_m(p - 1, q);
        L += D * adj(D, p - 1, q, p, q);
      }
      if (dn_q) {
        Eigen::MatrixXcd D = dbar_m(p, q - 1);
        L += D * adj(D, p, q - 1, p, q);
      }
      break;
    case LaplacianKind::DdbarBar:
      add_ddbar_terms();
      break;
    case LaplacianKind::BottChern: {
      if (up_p) {
        Eigen::MatrixXcd D = del_m(p, q);
        L += adj(D, p, q, p + 1, q) * D;
      }
      if (up_q) {
        Eigen::MatrixXcd D = dbar_m(p, q);
        L += adj(D, p, q, p, q + 1) * D;
      }
      add_ddbar_terms();
      if (up_q && dn_p) {
        // T = del* dbar : (p,q) -> (p-1,q+1)
        Eigen::MatrixXcd T =
            adj(del_m(p - 1, q + 1), p - 1, q + 1, p, q + 1) * dbar_m(p, q);
        L += adj(T, p, q, p - 1, q + 1) * T;
      }
      if (up_p && dn_q) {
        // T* with T = del* dbar : (p+1,q-1) -> (p,q)
        Eigen::MatrixXcd T =
            adj(del_m(p, q), p, q, p + 1, q) * dbar_m(p + 1, q - 1);
        L += T * adj(T, p + 1, q - 1, p, q);
      }
      break;
    }
    case LaplacianKind::Aeppli: {
      if (dn_p) {
        Eigen::MatrixXcd D = del_m(p - 1, q);
        L += D * adj(D, p - 1, q, p, q);
      }
      if (dn_q) {
        Eigen::MatrixXcd D = dbar_m(p, q - 1);
        L += D * adj(D, p, q - 1, p, q);
      }
      add_ddbar_terms();
      if (dn_q && up_p) {
        // T = del dbar* : (p,q) -> (p+1,q-1)
        Eigen::MatrixXcd T =
            del_m(p, q - 1) * adj(dbar_m(p, q - 1), p, q - 1, p, q);
        L += adj(T, p, q, p + 1, q - 1) * T;
      }
      if (dn_p && up_q) {
        // T' = del dbar* : (p-1,q+1) -> (p,q); add T' T'^*
        Eigen::MatrixXcd T2 =
            del_m(p - 1, q) * adj(dbar_m(p - 1, q), p - 1, q, p - 1, q + 1);
        L += T2 * adj(T2, p - 1, q + 1, p, q);
      }
      break;
    }
  }
  return L;
}

}  // namespace detail

// Streaming per-mode solve for constant metrics.  Any of the outputs may be
// null; lambda1 reports the smallest positive eigenvalue over all modes.
inline void constant_mode_solve(LaplacianKind kind, const MetricField& w,
                                int p, int q, const FormField* v,
                                FormField* green_out, FormField* harm_out,
                                double* lambda1) {
  const TorusGrid& g = w.grid();
  int n = g.n;
  detail::ConstGram gram(w);
  const auto& gd = gram.get(p, q);
  long m = g.npoints();
  int sz = (int)(binomial(n, p) * binomial(n, q));

  FormField vspec(g, p, q), gspec(g, p, q), hspec(g, p, q);
  if (v) {
    vspec = *v;
    for (int c = 0; c < sz; ++c) Fft::instance().forward(g, vspec.plane(c));
  }

  const auto& syms = dz_symbols(g);
  double l1 = std::numeric_limits<double>::infinity();
  Eigen::VectorXcd vec(sz);
  for (long x = 0; x < m; ++x) {
    std::array<cplx, 8> s{};
    for (int j = 0; j < n; ++j) s[j] = syms[j][x];
    Eigen::MatrixXcd L = detail::mode_laplacian(kind, n, p, q, s, gram);
    Eigen::MatrixXcd K = gd.Phalf * L * gd.Phalf_inv;
    K = 0.5 * (K + K.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(K);
    const Eigen::VectorXd& ev = es.eigenvalues();
    double cutoff = 1e-12 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    for (int i = 0; i < sz; ++i)
      if (ev[i] > cutoff) l1 = std::min(l1, ev[i]);
    if (v) {
      for (int c = 0; c < sz; ++c) vec[c] = vspec.at(c, x);
      Eigen::VectorXcd y = es.eigenvectors().adjoint() * (gd.Phalf * vec);
      Eigen::VectorXcd yg = y, yh = y;
      for (int i = 0; i < sz; ++i) {
        bool kernel = ev[i] <= cutoff;
        yg[i] = kernel ? cplx(0) : y[i] / ev[i];
        yh[i] = kernel ? y[i] : cplx(0);
      }
      if (green_out) {
        Eigen::VectorXcd r = gd.Phalf_inv * (es.eigenvectors() * yg);
        for (int c = 0; c < sz; ++c) gspec.at(c, x) = r[c];
      }
      if (harm_out) {
        Eigen::VectorXcd r = gd.Phalf_inv * (es.eigenvectors() * yh);
        for (int c = 0; c < sz; ++c) hspec.at(c, x) = r[c];
      }
    }
  }
  if (lambda1) *lambda1 = l1;
  if (v && green_out) {
    for (int c = 0; c < sz; ++c) Fft::instance().backward(g, gspec.plane(c));
    *green_out = gspec;
  }
  if (v && harm_out) {
    for (int c = 0; c < sz; ++c) Fft::instance().backward(g, hspec.plane(c));
    *harm_out = hspec;
  }
}

// Cached per-mode factorization: pays the eigendecompositions once, then
// applies Green / harmonic projection cheaply.  Meant for repeated use
// (preconditioning); memory scales with npoints * dim^2.
class ConstantModeCache {
 public:
  ConstantModeCache(LaplacianKind kind, const MetricField& w, int p, int q)
      : grid_(w.grid()), p_(p), q_(q) {
    int n = grid_.n;
    detail::ConstGram gram(w);
    const auto& gd = gram.get(p, q);
    Phalf_ = gd.Phalf;
    Phalf_inv_ = gd.Phalf_inv;
    long m = grid_.npoints();
    Q_.resize(m);
    ev_.resize(m);
    const auto& syms = dz_symbols(grid_);
    for (long x = 0; x < m; ++x) {
      std::array<cplx, 8> s{};
      for (int j = 0; j < n; ++j) s[j] = syms[j][x];
      Eigen::MatrixXcd L = detail::mode_laplacian(kind, n, p, q, s, gram);
      Eigen::MatrixXcd K = Phalf_ * L * Phalf_inv_;
      K = 0.5 * (K + K.adjoint().eval());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(K);
      Q_[x] = es.eigenvectors();
      ev_[x] = es.eigenvalues();
    }
  }

  // green (inverse on the range) or harmonic projection of v
  FormField apply(const FormField& v, bool harmonic) const {
    int sz = (int)Q_[0].rows();
    FormField spec = v;
    for (int c = 0; c < sz; ++c) Fft::instance().forward(grid_, spec.plane(c));
    Eigen::VectorXcd vec(sz);
    long m = grid_.npoints();
    for (long x = 0; x < m; ++x) {
      for (int c = 0; c < sz; ++c) vec[c] = spec.at(c, x);
      Eigen::VectorXcd y = Q_[x].adjoint() * (Phalf_ * vec);
      double cutoff =
          1e-12 * std::max(ev_[x].cwiseAbs().maxCoeff(), 1e-300);
      for (int i = 0; i < sz; ++i) {
        bool kernel = ev_[x][i] <= cutoff;
        if (harmonic)
          y[i] = kernel ? y[i] : cplx(0);
        else
          y[i] = kernel ? cplx(0) : y[i] / ev_[x][i];
      }
      Eigen::VectorXcd r = Phalf_inv_ * (Q_[x] * y);
      for (int c = 0; c < sz; ++c) spec.at(c, x) = r[c];
    }
    for (int c = 0; c < sz; ++c) Fft::instance().backward(grid_, spec.plane(c));
    return spec;
  }

  double lambda1() const {
    double l1 = std::numeric_limits<double>::infinity();
    for (size_t x = 0; x < ev_.size(); ++x) {
      double cutoff =
          1e-12 * std::max(ev_[x].cwiseAbs().maxCoeff(), 1e-300);
      for (int i = 0; i < ev_[x].size(); ++i)
        if (ev_[x][i] > cutoff) l1 = std::min(l1, ev_[x][i]);
    }
    return l1;
  }

 private:
  TorusGrid grid_;
  int p_, q_;
  Eigen::MatrixXcd Phalf_, Phalf_inv_;
  std::vector<Eigen::MatrixXcd> Q_;
  std::vector<Eigen::VectorXd> ev_;
};

// ---- variable-metric path: deflated preconditioned CG -----------------

struct GreenSolve {
  LaplacianKind kind = LaplacianKind::BottChern;
  double tol = 1e-10;
  int max_iter = 500;
};

namespace detail {

// Variable-metric Green/harmonic solver.  The discrete kernel is large (the
// zeroed Nyquist symbols add metric-dressed kernel directions at every
// all-{0, N/2} mode), so no explicit kernel basis is kept.  Instead: the
// kernel projector is a Chebyshev polynomial in Delta (1 at 0, tiny on
// [gap, lambda_max] -- only matrix-vector applies), and the Green operator
// is conjugate gradients in the weighted inner product on the deflated,
// hence consistent, system.
class KrylovGreen {
 public:
  KrylovGreen(LaplacianKind kind, const MetricField& w, int p, int q,
              double tol, int max_iter)
      : kind_(kind), w_(w), p_(p), q_(q), tol_(tol), max_iter_(max_iter) {
    Eigen::MatrixXcd Havg = average_H(w);
    MetricField wavg =
        MetricField::constant(w.grid(), MetricPoint(Havg));
    double l1 = 0;
    constant_mode_solve(kind_, wavg, p_, q_, nullptr, nullptr, nullptr, &l1);
    gap_ = 0.25 * l1;  // safety margin; validated and lowered on demand
    estimate_lambda_max();
  }

  FormField project_kernel(const FormField& v) {
    double nv = v.norm();
    if (nv == 0) return v;
    for (int attempt = 0; attempt < 4; ++attempt) {
      FormField p = cheb_filter(v);
      // validate: the result must be annihilated by Delta
      double drift =
          laplacian_apply(kind_, w_, p).norm() / (lam_max_ * nv);
      if (drift < 1e-10) return p;
      gap_ *= 0.25;  // gap estimate was too optimistic
    }
    throw solver_error("kernel projector: spectral gap not found", gap_);
  }

  FormField deflate(const FormField& v) { return v - project_kernel(v); }

  FormField green(const FormField& v) {
    FormField b = deflate(v);
    double nb = l2_norm(w_, b);
    FormField x(v.grid(), p_, q_);
    if (nb == 0) return x;
    // plain CG in the weighted inner product; the system is consistent and
    // kernel components never enter the Krylov space
    FormField r = b, pd = b;
    cplx rr = l2_inner(w_, r, r);
    for (int it = 0; it < max_iter_; ++it) {
      FormField Ap = laplacian_apply(kind_, w_, pd);
      cplx alpha = rr / l2_inner(w_, Ap, pd);
      FormField st = pd;
      st *= alpha;
      x += st;
      FormField rs = Ap;
      rs *= alpha;
      r -= rs;
      cplx rr_new = l2_inner(w_, r, r);
      if (std::sqrt(std::abs(rr_new)) < tol_ * nb) return x;
      cplx beta = rr_new / rr;
      rr = rr_new;
      FormField pn = r;
      FormField pb = pd;
      pb *= beta;
      pn += pb;
      pd = pn;
    }
    throw solver_error("krylov green: no convergence",
                       std::sqrt(std::abs(rr)) / nb);
  }

  double lambda1() {
    // inverse power iteration on the Green operator
    FormField x = deflate(random_seed_field());
    double mu = 0;
    for (int it = 0; it < 20; ++it) {
      FormField y = green(x);
      double ny = l2_norm(w_, y);
      if (ny == 0) throw solver_error("lambda1: breakdown", 0.0);
      y *= 1.0 / ny;
      double mu_new = l2_inner(w_, laplacian_apply(kind_, w_, y), y).real();
      if (std::abs(mu_new - mu) < 1e-8 * std::abs(mu_new)) return mu_new;
      mu = mu_new;
      x = y;
    }
    return mu;
  }

 private:
  LaplacianKind kind_;
  const MetricField& w_;
  int p_, q_;
  double tol_;
  int max_iter_;
  double gap_ = 1.0, lam_max_ = 1.0;

  static Eigen::MatrixXcd average_H(const MetricField& w) {
    if (w.is_constant()) return w.H(0);
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(w.n(), w.n());
    long m = w.grid().npoints();
    for (long x = 0; x < m; ++x) A += w.H(x);
    return A / double(m);
  }

  FormField random_seed_field() {
    FormField f(w_.grid(), p_, q_);
    std::mt19937 rs(271828);
    std::normal_distribution<double> d;
    for (int c = 0; c < f.ncoeff(); ++c) {
      cplx* pl = f.plane(c);
      for (long x = 0; x < f.npoints(); ++x) pl[x] = cplx(d(rs), d(rs));
    }
    return f;
  }

  void estimate_lambda_max() {
    FormField x = random_seed_field();
    x *= 1.0 / x.norm();
    double mu = 1.0;
    for (int it = 0; it < 25; ++it) {
      FormField y = laplacian_apply(kind_, w_, x);
      double ny = y.norm();
      if (ny == 0) break;
      mu = ny;
      y *= 1.0 / ny;
      x = y;
    }
    lam_max_ = 1.2 * mu;
  }

  // Chebyshev spectral filter: polynomial equal to 1 at 0 and below ~1e-14
  // on [gap_, lam_max_], applied to v via the three-term recurrence.
  FormField cheb_filter(const FormField& v) const {
    double a = gap_, b = lam_max_;
    double t0 = (a + b) / (b - a);
    // scalar recurrence to pick the degree
    double Tprev = 1.0, Tcur = t0;
    int d = 1;
    while (Tcur < 1e14 && d < 4000) {
      double Tnext = 2 * t0 * Tcur - Tprev;
      Tprev = Tcur;
      Tcur = Tnext;
      ++d;
    }
    auto tmap = [&](const FormField& f) {
      FormField y = laplacian_apply(kind_, w_, f);
      y *= 2.0 / (b - a);
      FormField sf = f;
      sf *= (a + b) / (b - a);
      y -= sf;
      y *= -1.0;  // t(x) = (a + b - 2x) / (b - a): equals +1 at x = 0
      return y;
    };
    FormField yprev = v;
    FormField ycur = tmap(v);
    double Sprev = 1.0, Scur = t0;
    for (int k = 1; k < d; ++k) {
      FormField ynext = tmap(ycur);
      ynext *= 2.0;
      ynext -= yprev;
      yprev = ycur;
      ycur = ynext;
      double Snext = 2 * t0 * Scur - Sprev;
      Sprev = Scur;
      Scur = Snext;
    }
    FormField out = ycur;
    out *= 1.0 / Scur;
    return out;
  }
};

}  // namespace detail

// ---- public operations ------------------------------------------------

inline FormField green_apply(const GreenSolve& gs, const MetricField& w,
                             const FormField& v) {
  if (w.is_constant()) {
    FormField out(v.grid(), v.p(), v.q());
    constant_mode_solve(gs.kind, w, v.p(), v.q(), &v, &out, nullptr, nullptr);
    return out;
  }
  detail::KrylovGreen kg(gs.kind, w, v.p(), v.q(), gs.tol, gs.max_iter);
  return kg.green(v);
}

inline FormField harmonic_project(LaplacianKind kind, const MetricField& w,
                                  const FormField& F) {
  if (w.is_constant()) {
    FormField out(F.grid(), F.p(), F.q());
    constant_mode_solve(kind, w, F.p(), F.q(), &F, nullptr, &out, nullptr);
    return out;
  }
  detail::KrylovGreen kg(kind, w, F.p(), F.q(), 1e-10, 500);
  return kg.project_kernel(F);
}

inline double smallest_positive_eigenvalue(LaplacianKind kind,
                                           const MetricField& w, int p, int q) {
  if (w.is_constant()) {
    double l1 = 0;
    constant_mode_solve(kind, w, p, q, nullptr, nullptr, nullptr, &l1);
    return l1;
  }
  detail::KrylovGreen kg(kind, w, p, q, 1e-10, 500);
  return kg.lambda1();
}

struct ThreeSpace {
  FormField h, e, c;  // harmonic, image ("exact"), and adjoint-image parts
};

inline ThreeSpace three_space_decompose(LaplacianKind kind,
                                        const MetricField& w,
                                        const FormField& F) {
  if (kind != LaplacianKind::BottChern && kind != LaplacianKind::Aeppli)
    throw config_error("three_space_decompose: BottChern or Aeppli only");
  GreenSolve gs{kind};
  FormField GF = green_apply(gs, w, F);
  FormField h = harmonic_project(kind, w, F);
  ThreeSpace out;
  out.h = h;
  if (kind == LaplacianKind::BottChern) {
    out.e = ddbar(ddbar_adj(w, GF));  // Im del dbar
    out.c = F - h - out.e;            // Im del* + Im dbar*
  } else {
    out.c = ddbar_adj(w, ddbar(GF));  // Im (del dbar)*
    out.e = F - h - out.c;            // Im del + Im dbar
  }
  return out;
}

enum class MinDdbarVia { BC, DdbarBar };

// Minimal L2-norm solution u of del dbar u = v (v must be del-dbar-exact).
inline FormField min_ddbar_solve(const MetricField& w, const FormField& v,
                                 MinDdbarVia via) {
  ThreeSpace ts = three_space_decompose(LaplacianKind::BottChern, w, v);
  double nv = l2_norm(w, v);
  double off = std::hypot(l2_norm(w, ts.h), l2_norm(w, ts.c));
  if (nv > 0 && off > 1e-8 * nv)
    throw solver_error("min_ddbar_solve: right side not del-dbar-exact",
                       off / nv);
  GreenSolve gs{via == MinDdbarVia::BC ? LaplacianKind::BottChern
                                       : LaplacianKind::DdbarBar};
  return ddbar_adj(w, green_apply(gs, w, v));
}

// d-closed Aeppli-cohomologous representative of Omega (del dbar Omega = 0):
// Gamma = del (del dbar)* G_BC (dbar Omega) + Omega - dbar (del dbar)* G_BC (del Omega).
inline FormField d_closed_aeppli_rep(const MetricField& w, const FormField& Om) {
  double nOm = l2_norm(w, Om) + 1e-300;
  if (detail::deg_ok(w.n(), Om.p() + 1, Om.q() + 1) &&
      l2_norm(w, ddbar(Om)) > 1e-9 * nOm)
    throw solver_error("d_closed_aeppli_rep: input not del-dbar-closed",
                       l2_norm(w, ddbar(Om)) / nOm);
  FormField G = Om;
  if (detail::deg_ok(w.n(), Om.p(), Om.q() + 1)) {
    FormField b = dbar(Om);
    GreenSolve gs{LaplacianKind::BottChern};
    G += del(ddbar_adj(w, green_apply(gs, w, b)));
  }
  if (detail::deg_ok(w.n(), Om.p() + 1, Om.q())) {
    FormField a = del(Om);
    GreenSolve gs{LaplacianKind::BottChern};
    G -= dbar(ddbar_adj(w, green_apply(gs, w, a)));
  }
  return G;
}

// Hermitian-symplectic completion of a pluriclosed metric: the minimal-norm
// alpha^{2,0} with dbar alpha = -del omega; del alpha vanishes on the torus.
inline FormField hs_completion(const MetricField& w) {
  FormField wf = w.form();
  FormField b = del(wf);
  double nb = l2_norm(w, wf) + 1e-300;
  if (l2_norm(w, ddbar(wf)) > 1e-9 * nb)
    throw solver_error("hs_completion: metric not pluriclosed",
                       l2_norm(w, ddbar(wf)) / nb);
  b *= -1.0;
  GreenSolve gs{LaplacianKind::Dolbeault};
  FormField alpha = dbar_adj(w, green_apply(gs, w, b));  // (2,0)
  return alpha;
}

}  // namespace gauduchon
