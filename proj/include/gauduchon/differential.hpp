#pragma once

// Spectral d-bar calculus on torus fields: del, dbar, their unweighted
// spectral adjoints, the metric Gram weights, exact weighted adjoints, and
// the L2 inner product.  d/dz_j has Fourier symbol (i kx + ky)/2 on the mode
// e^{i(kx x_j + ky y_j)}; the Nyquist frequency is zeroed to keep first
// derivatives skew-adjoint.

#include "gauduchon/form_field.hpp"
#include "gauduchon/wedge.hpp"

namespace gauduchon {

// Cached symbol planes s_j(k) for d/dz_j.
inline const std::vector<Eigen::VectorXcd>& dz_symbols(const TorusGrid& g) {
  static std::map<std::pair<int, int>, std::vector<Eigen::VectorXcd>> cache;
  auto key = std::make_pair(g.n, g.N);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  long m = g.npoints();
  std::vector<Eigen::VectorXcd> syms(g.n, Eigen::VectorXcd(m));
  for (long x = 0; x < m; ++x) {
    auto idx = g.decode(x);
    for (int j = 0; j < g.n; ++j) {
      int ax = idx[2 * j], ay = idx[2 * j + 1];
      double kx = (ax == g.N / 2) ? 0.0 : g.wavenumber(ax);
      double ky = (ay == g.N / 2) ? 0.0 : g.wavenumber(ay);
      syms[j][x] = cplx(ky / 2.0, kx / 2.0);  // (i kx + ky)/2
    }
  }
  return cache.emplace(key, std::move(syms)).first->second;
}

namespace detail {

// Derivative of one coefficient plane: out = d/dz_j (bar=false) or d/dzbar_j
// applied via the given spectrum; dagger = multiply by the conjugate symbol
// (the unweighted adjoint).
inline void mode_multiply(const TorusGrid& g, const Eigen::VectorXcd& spec,
                          int j, bool bar, bool dagger, cplx* out) {
  const auto& s = dz_symbols(g)[j];
  long m = g.npoints();
  for (long x = 0; x < m; ++x) {
    cplx sym = bar ? -std::conj(s[x]) : s[x];
    if (dagger) sym = std::conj(sym);
    out[x] = spec[x] * sym;
  }
  Fft::instance().backward(g, out);
}

}  // namespace detail

// del (bar=false) or dbar (bar=true): (p,q) -> (p+1,q) or (p,q+1).
inline FormField half_d(const FormField& F, bool bar) {
  const TorusGrid& g = F.grid();
  int n = g.n;
  FormField out(g, F.p() + (bar ? 0 : 1), F.q() + (bar ? 1 : 0));
  const auto& holo = degree_basis(n, F.p()).masks;
  const auto& anti = degree_basis(n, F.q()).masks;
  long m = g.npoints();
  Eigen::VectorXcd spec(m), tmp(m);
  PointForm in_l(n, F.p(), F.q()), out_l(n, out.p(), out.q());
  for (mask_t I : holo)
    for (mask_t J : anti) {
      int c = in_l.flat_index(I, J);
      std::copy(F.plane(c), F.plane(c) + m, spec.data());
      Fft::instance().forward(g, spec.data());
      for (int j = 0; j < n; ++j) {
        mask_t bj = mask_t(1) << j;
        mask_t tgt_h = bar ? I : (I | bj), tgt_a = bar ? (J | bj) : J;
        if (!bar && (I & bj)) continue;
        if (bar && (J & bj)) continue;
        double sgn = bar ? ((F.p() % 2 ? -1.0 : 1.0) * merge_sign(bj, J))
                         : merge_sign(bj, I);
        detail::mode_multiply(g, spec, j, bar, false, tmp.data());
        cplx* op = out.plane(out_l.flat_index(tgt_h, tgt_a));
        for (long x = 0; x < m; ++x) op[x] += sgn * tmp[x];
      }
    }
  return out;
}

inline FormField del(const FormField& F) { return half_d(F, false); }
inline FormField dbar(const FormField& F) { return half_d(F, true); }

// Unweighted adjoint of del/dbar: (p,q) -> (p-1,q) or (p,q-1).
inline FormField half_d_dagger(const FormField& G, bool bar) {
  const TorusGrid& g = G.grid();
  int n = g.n;
  FormField out(g, G.p() - (bar ? 0 : 1), G.q() - (bar ? 1 : 0));
  const auto& holo = degree_basis(n, out.p()).masks;
  const auto& anti = degree_basis(n, out.q()).masks;
  long m = g.npoints();
  Eigen::VectorXcd spec(m), tmp(m);
  PointForm in_l(n, G.p(), G.q()), out_l(n, out.p(), out.q());
  // same index pattern as half_d, with source and target exchanged
  for (mask_t I : holo)
    for (mask_t J : anti) {
      cplx* op = out.plane(out_l.flat_index(I, J));
      for (int j = 0; j < n; ++j) {
        mask_t bj = mask_t(1) << j;
        if (!bar && (I & bj)) continue;
        if (bar && (J & bj)) continue;
        mask_t src_h = bar ? I : (I | bj), src_a = bar ? (J | bj) : J;
        double sgn = bar ? ((out.p() % 2 ? -1.0 : 1.0) * merge_sign(bj, J))
                         : merge_sign(bj, I);
        int c = in_l.flat_index(src_h, src_a);
        std::copy(G.plane(c), G.plane(c) + m, spec.data());
        Fft::instance().forward(g, spec.data());
        detail::mode_multiply(g, spec, j, bar, true, tmp.data());
        for (long x = 0; x < m; ++x) op[x] += sgn * tmp[x];
      }
    }
  return out;
}

// ---- metric Gram weights ---------------------------------------------
// (ortho_transform / gram_weight live with MetricField; the weighted apply
// below uses the per-point cache when the metric varies.)

// F <- W F pointwise (inverse=false) or F <- W^{-1} F (inverse=true).
inline void apply_weight(const MetricField& w, FormField& F, bool inverse) {
  const TorusGrid& g = F.grid();
  long m = g.npoints();
  int sz = F.ncoeff();
  Eigen::VectorXcd v(sz);
  if (w.is_constant()) {
    Eigen::MatrixXcd W = gram_weight(w.frame(0), g.n, F.p(), F.q());
    Eigen::LDLT<Eigen::MatrixXcd> ldlt;
    if (inverse) ldlt.compute(W);
    for (long x = 0; x < m; ++x) {
      for (int c = 0; c < sz; ++c) v[c] = F.at(c, x);
      v = inverse ? ldlt.solve(v).eval() : (W * v).eval();
      for (int c = 0; c < sz; ++c) F.at(c, x) = v[c];
    }
  } else if (const auto* wp = w.weights(F.p(), F.q())) {
    for (long x = 0; x < m; ++x) {
      for (int c = 0; c < sz; ++c) v[c] = F.at(c, x);
      v = ((inverse ? wp->Winv[x] : wp->W[x]) * v).eval();
      for (int c = 0; c < sz; ++c) F.at(c, x) = v[c];
    }
  } else {
    for (long x = 0; x < m; ++x) {
      Eigen::MatrixXcd W = gram_weight(w.frame(x), g.n, F.p(), F.q());
      for (int c = 0; c < sz; ++c) v[c] = F.at(c, x);
      v = inverse ? W.ldlt().solve(v).eval() : (W * v).eval();
      for (int c = 0; c < sz; ++c) F.at(c, x) = v[c];
    }
  }
}

// Exact discrete adjoints w.r.t. l2_inner.
inline FormField del_adj(const MetricField& w, const FormField& v) {
  FormField t = v;
  apply_weight(w, t, false);
  t = half_d_dagger(t, false);
  apply_weight(w, t, true);
  return t;
}

inline FormField dbar_adj(const MetricField& w, const FormField& v) {
  FormField t = v;
  apply_weight(w, t, false);
  t = half_d_dagger(t, true);
  apply_weight(w, t, true);
  return t;
}

// (del dbar)^* = dbar^* del^*
inline FormField ddbar_adj(const MetricField& w, const FormField& v) {
  return dbar_adj(w, del_adj(w, v));
}

inline FormField ddbar(const FormField& F) { return del(dbar(F)); }

// Pointwise Hodge star over a metric field.
inline FormField star_field(const MetricField& w, const FormField& F) {
  const TorusGrid& g = F.grid();
  FormField out(g, g.n - F.q(), g.n - F.p());
  long m = g.npoints();
  if (w.is_constant()) {
    FrameChange fc = frame_change_of(w.frame(0));
    // the star is one constant linear map on coefficients; build it once
    PointForm probe(g.n, F.p(), F.q());
    int sz = probe.size();
    Eigen::MatrixXcd S(out.ncoeff(), sz);
    for (int c = 0; c < sz; ++c) {
      PointForm e(g.n, F.p(), F.q());
      e.coeffs()[c] = 1.0;
      S.col(c) = hodge_star(fc, e).coeffs();
    }
    Eigen::VectorXcd v(sz);
    for (long x = 0; x < m; ++x) {
      for (int c = 0; c < sz; ++c) v[c] = F.at(c, x);
      Eigen::VectorXcd o = S * v;
      for (int c = 0; c < out.ncoeff(); ++c) out.at(c, x) = o[c];
    }
  } else {
    for (long x = 0; x < m; ++x)
      out.set_point(x, hodge_star(frame_change_of(w.frame(x)), F.point(x)));
  }
  return out;
}

// ---- integrals --------------------------------------------------------

inline cplx l2_inner(const MetricField& w, const FormField& F,
                     const FormField& G) {
  if (F.p() != G.p() || F.q() != G.q())
    throw degree_error("l2_inner: bidegree mismatch");
  FormField WF = F;
  apply_weight(w, WF, false);
  const TorusGrid& g = F.grid();
  double cell = std::pow(g.h(), 2 * g.n);
  return G.data().dot(WF.data()) * cell;
}

inline double l2_norm(const MetricField& w, const FormField& F) {
  return std::sqrt(std::abs(l2_inner(w, F, F)));
}

// Integral of an (n,n)-form field: the top coefficient measures
// c * dz_{1..n} ^ dzbar_{1..n}; dV_id integrates to (2pi)^{2n}.
inline cplx integrate_top(const FormField& F) {
  const TorusGrid& g = F.grid();
  if (F.p() != g.n || F.q() != g.n)
    throw degree_error("integrate_top: not a top form");
  cplx sum = 0.0;
  long m = g.npoints();
  const cplx* c = F.plane(0);
  for (long x = 0; x < m; ++x) sum += c[x];
  return sum / top_unit(g.n) * std::pow(g.h(), 2 * g.n);
}

// ---- pointwise algebra lifted to fields -------------------------------

inline FormField wedge_field(const FormField& F, const FormField& G) {
  const TorusGrid& g = F.grid();
  FormField out(g, F.p() + G.p(), F.q() + G.q());
  const auto& table = wedge_table(g.n, F.p(), F.q(), G.p(), G.q());
  long m = g.npoints();
  for (const auto& t : table) {
    const cplx* a = F.plane(t.a);
    const cplx* b = G.plane(t.b);
    cplx* o = out.plane(t.out);
    for (long x = 0; x < m; ++x) o[x] += t.sign * a[x] * b[x];
  }
  return out;
}

inline FormField wedge_power_field(const FormField& F, int k) {
  FormField r(F.grid(), 0, 0);
  for (long x = 0; x < r.npoints(); ++x) r.at(0, x) = 1.0;
  for (int i = 0; i < k; ++i) r = wedge_field(r, F);
  return r;
}

// scalar field times form field
inline FormField scale_field(const FormField& s, const FormField& F) {
  FormField out = F;
  long m = F.npoints();
  const cplx* sv = s.plane(0);
  for (int c = 0; c < F.ncoeff(); ++c) {
    cplx* o = out.plane(c);
    for (long x = 0; x < m; ++x) o[x] *= sv[x];
  }
  return out;
}

inline double mean_scalar(const FormField& s) {
  cplx sum = 0;
  long m = s.npoints();
  const cplx* v = s.plane(0);
  for (long x = 0; x < m; ++x) sum += v[x];
  return sum.real() / double(m);
}

}  // namespace gauduchon
