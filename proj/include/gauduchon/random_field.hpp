#pragma once

// Seeded band-limited random fields and metric samplers.  All randomness
// flows from one mt19937 per construction, so fields are reproducible.

#include <random>

#include "gauduchon/differential.hpp"

namespace gauduchon {

// Band-limited complex scalar plane: Gaussian Fourier coefficients on
// |k|_inf <= bandlimit (all axes), zero elsewhere.
inline Eigen::VectorXcd bandlimited_plane(const TorusGrid& g, std::mt19937& rs,
                                          int bandlimit) {
  long m = g.npoints();
  Eigen::VectorXcd spec = Eigen::VectorXcd::Zero(m);
  std::normal_distribution<double> d(0.0, 1.0);
  for (long x = 0; x < m; ++x) {
    auto idx = g.decode(x);
    bool in = true;
    for (int a = 0; a < g.axes(); ++a)
      if (std::abs(g.wavenumber(idx[a])) > bandlimit || idx[a] == g.N / 2)
        in = false;
    if (!in) continue;
    spec[x] = cplx(d(rs), d(rs));
  }
  Fft::instance().backward(g, spec.data());
  spec *= double(m);  // undo the 1/m normalization: O(1) amplitudes
  return spec;
}

inline FormField random_field(const TorusGrid& g, int p, int q, unsigned seed,
                              double amplitude, int bandlimit,
                              bool make_real = false) {
  std::mt19937 rs(seed);
  FormField F(g, p, q);
  for (int c = 0; c < F.ncoeff(); ++c) {
    Eigen::VectorXcd plane = bandlimited_plane(g, rs, bandlimit);
    std::copy(plane.data(), plane.data() + g.npoints(), F.plane(c));
  }
  if (make_real) {
    F += conj_field(F);
    F *= 0.5;
  }
  double top = F.max_abs();
  if (top > 0) F *= amplitude / top;
  return F;
}

inline FormField random_scalar(const TorusGrid& g, unsigned seed,
                               double amplitude, int bandlimit) {
  return random_field(g, 0, 0, seed, amplitude, bandlimit, true);
}

struct MetricSpec {
  enum Kind { Constant, Conformal, Perturbed } kind = Constant;
  Eigen::MatrixXcd H;  // base matrix
  unsigned seed = 1;
  double amplitude = 0.1;
  int bandlimit = 2;
};

inline MetricField sample_metric(const TorusGrid& g, const MetricSpec& spec) {
  MetricPoint base(spec.H);
  if (spec.kind == MetricSpec::Constant)
    return MetricField::constant(g, base);

  long m = g.npoints();
  if (spec.kind == MetricSpec::Conformal) {
    FormField sig = random_scalar(g, spec.seed, spec.amplitude, spec.bandlimit);
    std::vector<Eigen::MatrixXcd> Hs(m);
    for (long x = 0; x < m; ++x)
      Hs[x] = std::exp(sig.at(0, x).real()) * base.H;
    return MetricField::variable(g, std::move(Hs));
  }

  // Perturbed: Hermitian band-limited perturbation, scaled so its largest
  // spectral norm is amplitude * (minimal eigenvalue of H) — positivity is
  // then automatic for amplitude < 1.
  std::mt19937 rs(spec.seed);
  int n = g.n;
  std::vector<Eigen::VectorXcd> entry(n * n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) entry[j * n + k] = bandlimited_plane(g, rs, spec.bandlimit);
  double worst = 0.0;
  std::vector<Eigen::MatrixXcd> Hs(m);
  for (long x = 0; x < m; ++x) {
    Eigen::MatrixXcd P(n, n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) P(j, k) = entry[j * n + k][x];
    P = 0.5 * (P + P.adjoint().eval());
    Hs[x] = P;
    worst = std::max(worst, P.operatorNorm());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(base.H);
  double scale = spec.amplitude * es.eigenvalues().minCoeff() / worst;
  for (long x = 0; x < m; ++x) Hs[x] = base.H + scale * Hs[x];
  return MetricField::variable(g, std::move(Hs));
}

}  // namespace gauduchon
