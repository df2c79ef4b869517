#pragma once

// Hodge star with the convention  u ^ star(conj v) = <u,v> dV,  dV = w^n/n!.
// Computed combinatorially in an omega-orthonormal coframe reached by
// FrameChange; one code path for every bidegree.

#include "gauduchon/metric_point.hpp"
#include "gauduchon/wedge.hpp"

namespace gauduchon {

// dV for the identity metric is nu * dz_{1..n} ^ dzbar_{1..n}.
inline cplx top_unit(int n) {
  cplx nu = std::pow(cplx(0, 1), n);
  if ((n * (n - 1) / 2) % 2) nu = -nu;
  return nu;
}

inline PointForm volume_form(const MetricPoint& w) {
  int n = w.n();
  mask_t full = (mask_t(1) << n) - 1;
  PointForm dv(n, n, n);
  dv.at(full, full) = top_unit(n) * w.H.determinant();
  return dv;
}

// Star of a basis monomial at the identity metric:
// star(e_{A,B}) = (-1)^{pq} (nu/kappa) e_{Bc,Ac} with
// e_{B,A} ^ e_{Bc,Ac} = kappa e_{full,full}.
inline PointForm star_identity(const PointForm& u) {
  int n = u.n(), p = u.p(), q = u.q();
  mask_t full = (mask_t(1) << n) - 1;
  PointForm r(n, n - q, n - p);
  cplx nu = top_unit(n);
  double flip = (p * q) % 2 ? -1.0 : 1.0;
  const auto& holo = degree_basis(n, p).masks;
  const auto& anti = degree_basis(n, q).masks;
  for (mask_t A : holo)
    for (mask_t B : anti) {
      cplx c = u.at(A, B);
      if (c == cplx(0)) continue;
      mask_t Ac = full & ~A, Bc = full & ~B;
      double kappa = ((p * (n - q)) % 2 ? -1.0 : 1.0) *
                     merge_sign(B, Bc) * merge_sign(A, Ac);
      r.at(Bc, Ac) += c * flip * nu / kappa;
    }
  return r;
}

inline PointForm hodge_star(const MetricPoint& w, const PointForm& u) {
  FrameChange fc(w);
  return from_orthonormal(fc, star_identity(to_orthonormal(fc, u)));
}

inline PointForm hodge_star(const FrameChange& fc, const PointForm& u) {
  return from_orthonormal(fc, star_identity(to_orthonormal(fc, u)));
}

// Pointwise Hermitian inner product, linear in u.
inline cplx inner_product(const MetricPoint& w, const PointForm& u,
                          const PointForm& v) {
  if (u.p() != v.p() || u.q() != v.q())
    throw degree_error("inner_product: bidegree mismatch");
  FrameChange fc(w);
  // Eigen's dot conjugates its object, so v.dot(u) is linear in u.
  return to_orthonormal(fc, v).coeffs().dot(to_orthonormal(fc, u).coeffs());
}

inline cplx inner_product(const FrameChange& fc, const PointForm& u,
                          const PointForm& v) {
  if (u.p() != v.p() || u.q() != v.q())
    throw degree_error("inner_product: bidegree mismatch");
  return to_orthonormal(fc, v).coeffs().dot(to_orthonormal(fc, u).coeffs());
}

}  // namespace gauduchon
