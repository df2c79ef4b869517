#pragma once

// Wedge product of PointForms.  Sign convention: within a monomial all dz
// factors precede all dzbar factors, so joining (I1,J1) with (I2,J2) moves
// dzbar_J1 past dz_I2, contributing (-1)^{|J1||I2|}, then each index block is
// merged with its shuffle parity.

#include <map>
#include <tuple>

#include "gauduchon/point_form.hpp"

namespace gauduchon {

struct WedgeTerm {
  int a, b, out;  // flat indices into u, v, result
  double sign;
};

using WedgeTable = std::vector<WedgeTerm>;

inline WedgeTable build_wedge_table(int n, int p1, int q1, int p2, int q2) {
  WedgeTable t;
  const auto& H1 = degree_basis(n, p1).masks;
  const auto& A1 = degree_basis(n, q1).masks;
  const auto& H2 = degree_basis(n, p2).masks;
  const auto& A2 = degree_basis(n, q2).masks;
  PointForm u(n, p1, q1), v(n, p2, q2), w(n, p1 + p2, q1 + q2);
  double cross = (q1 * p2) % 2 ? -1.0 : 1.0;
  for (mask_t I1 : H1)
    for (mask_t J1 : A1)
      for (mask_t I2 : H2)
        for (mask_t J2 : A2) {
          if ((I1 & I2) || (J1 & J2)) continue;
          double s = cross * merge_sign(I1, I2) * merge_sign(J1, J2);
          t.push_back({u.flat_index(I1, J1), v.flat_index(I2, J2),
                       w.flat_index(I1 | I2, J1 | J2), s});
        }
  return t;
}

inline const WedgeTable& wedge_table(int n, int p1, int q1, int p2, int q2) {
  static std::map<std::tuple<int, int, int, int, int>, WedgeTable> cache;
  auto key = std::make_tuple(n, p1, q1, p2, q2);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, build_wedge_table(n, p1, q1, p2, q2)).first;
  return it->second;
}

inline PointForm wedge(const PointForm& u, const PointForm& v) {
  int n = u.n();
  if (u.p() + v.p() > n || u.q() + v.q() > n)
    throw degree_error("wedge: bidegree overflow");
  PointForm w(n, u.p() + v.p(), u.q() + v.q());
  for (const auto& t : wedge_table(n, u.p(), u.q(), v.p(), v.q()))
    w.coeffs()[t.out] += t.sign * u.coeffs()[t.a] * v.coeffs()[t.b];
  return w;
}

// u^k / k!  (k-th wedge power with the usual factorial normalization left to
// the caller; this returns the plain power)
inline PointForm wedge_power(const PointForm& u, int k) {
  PointForm r(u.n(), 0, 0);
  r.coeffs()[0] = 1.0;
  for (int i = 0; i < k; ++i) r = wedge(r, u);
  return r;
}

}  // namespace gauduchon
