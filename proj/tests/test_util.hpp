#pragma once

#include <random>

#include "gauduchon/hat_root.hpp"

namespace gtest_util {

using namespace gauduchon;

inline std::mt19937& rng(unsigned seed = 0) {
  static std::mt19937 gen(12345);
  if (seed) gen.seed(seed);
  return gen;
}

inline cplx rand_cplx(std::mt19937& g) {
  std::normal_distribution<double> d(0.0, 1.0);
  return {d(g), d(g)};
}

inline PointForm random_form(int n, int p, int q, std::mt19937& g) {
  PointForm f(n, p, q);
  for (int i = 0; i < f.size(); ++i) f.coeffs()[i] = rand_cplx(g);
  return f;
}

inline PointForm random_real_form(int n, int p, std::mt19937& g) {
  PointForm f = random_form(n, p, p, g);
  f += conj_form(f);
  f *= 0.5;
  return f;
}

// Random Hermitian positive definite, eigenvalues in roughly [0.3, 3].
inline MetricPoint random_metric(int n, std::mt19937& g) {
  Eigen::MatrixXcd A(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) A(j, k) = rand_cplx(g);
  Eigen::MatrixXcd H = 0.3 * Eigen::MatrixXcd::Identity(n, n) +
                       0.5 * A * A.adjoint() / double(n);
  return MetricPoint(H);
}

// Random positive (n-1,n-1)-form: gamma^{n-1} for a random metric gamma.
inline PointForm random_positive_hat(int n, std::mt19937& g) {
  return wedge_power(random_metric(n, g).form(), n - 1);
}

}  // namespace gtest_util
