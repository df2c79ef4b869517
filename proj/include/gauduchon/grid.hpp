#pragma once

// Uniform grid on the torus C^n / (2pi Z)^{2n}.  Real axes are ordered
// x1,y1,...,xn,yn, row-major with x1 slowest; every axis has N points and
// period 2pi.

#include <array>
#include <cmath>
#include <vector>

#include "gauduchon/errors.hpp"

namespace gauduchon {

struct TorusGrid {
  int n = 0;
  int N = 0;

  TorusGrid() = default;
  TorusGrid(int n_, int N_) : n(n_), N(N_) {
    if (N < 4 || N % 2 != 0) throw config_error("grid: N must be even, >= 4");
  }

  bool operator==(const TorusGrid& o) const { return n == o.n && N == o.N; }

  double h() const { return 2.0 * M_PI / N; }
  int axes() const { return 2 * n; }
  long npoints() const {
    long m = 1;
    for (int a = 0; a < axes(); ++a) m *= N;
    return m;
  }

  // integer wavenumber of grid frequency index a, Nyquist kept positive
  int wavenumber(int a) const { return a <= N / 2 ? a : a - N; }

  std::array<int, 16> decode(long x) const {
    std::array<int, 16> idx{};
    for (int a = axes() - 1; a >= 0; --a) {
      idx[a] = int(x % N);
      x /= N;
    }
    return idx;
  }

  // coordinates (x_j, y_j) of a flat index
  std::array<double, 16> coords(long x) const {
    auto idx = decode(x);
    std::array<double, 16> c{};
    for (int a = 0; a < axes(); ++a) c[a] = h() * idx[a];
    return c;
  }
};

}  // namespace gauduchon
