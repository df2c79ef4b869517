#include <catch2/catch_amalgamated.hpp>

#include "gauduchon/field_io.hpp"
#include "gauduchon/random_field.hpp"
#include "test_util.hpp"

using namespace gauduchon;
using namespace gtest_util;

namespace {

FormField scalar_from(const TorusGrid& g,
                      const std::function<cplx(std::array<double, 16>)>& f) {
  FormField F(g, 0, 0);
  for (long x = 0; x < g.npoints(); ++x) F.at(0, x) = f(g.coords(x));
  return F;
}

double rel(double a, double b) { return a / std::max(b, 1e-300); }

}  // namespace

TEST_CASE("derivative of constants vanishes; single-mode oracle") {
  TorusGrid g(2, 8);
  FormField c(g, 0, 0);
  for (long x = 0; x < g.npoints(); ++x) c.at(0, x) = 3.7;
  REQUIRE(del(c).norm() < 1e-12);
  REQUIRE(dbar(c).norm() < 1e-12);

  // F = e^{i x1}: dF/dz1 = (i/2) F, dF/dzbar1 = (i/2) F
  FormField F = scalar_from(g, [](auto co) {
    return std::exp(cplx(0, 1) * co[0]);
  });
  FormField dF = del(F);
  PointForm probe(2, 1, 0);
  for (long x : {0L, 5L, 100L}) {
    cplx expect = cplx(0, 0.5) * F.at(0, x);
    REQUIRE(std::abs(dF.at(probe.flat_index(1, 0), x) - expect) < 1e-12);
    REQUIRE(std::abs(dF.at(probe.flat_index(2, 0), x)) < 1e-12);
  }
  // e^{i y1}: d/dz1 = (1/2) F
  FormField G = scalar_from(g, [](auto co) {
    return std::exp(cplx(0, 1) * co[1]);
  });
  FormField dG = del(G);
  for (long x : {0L, 17L}) {
    cplx expect = 0.5 * G.at(0, x);
    REQUIRE(std::abs(dG.at(probe.flat_index(1, 0), x) - expect) < 1e-12);
  }
}

TEST_CASE("complex structure identities on random fields") {
  for (auto [n, N] : {std::pair{2, 8}, std::pair{3, 4}}) {
    TorusGrid g(n, N);
    for (auto [p, q] : {std::pair{0, 0}, std::pair{1, 1}, std::pair{1, 0}}) {
      FormField F = random_field(g, p, q, 42 + n, 1.0, N / 2 - 1);
      double s = F.norm() + 1;
      if (p + 2 <= n) REQUIRE(del(del(F)).norm() < 1e-12 * s);
      if (q + 2 <= n) REQUIRE(dbar(dbar(F)).norm() < 1e-12 * s);
      if (p + 1 <= n && q + 1 <= n) {
        FormField anti = del(dbar(F)) + dbar(del(F));
        REQUIRE(anti.norm() < 1e-12 * s);
      }
    }
  }
}

TEST_CASE("l2 inner product: volume, Parseval, positivity") {
  TorusGrid g(2, 8);
  MetricField id = MetricField::constant(g, MetricPoint::identity(2));

  FormField dz1(g, 1, 0);
  PointForm probe(2, 1, 0);
  for (long x = 0; x < g.npoints(); ++x) dz1.at(probe.flat_index(1, 0), x) = 1.0;
  cplx v = l2_inner(id, dz1, dz1);
  double vol = std::pow(2 * M_PI, 4);
  REQUIRE(std::abs(v - cplx(vol)) < 1e-9 * vol);

  // Parseval on scalars
  FormField F = random_field(g, 0, 0, 7, 1.0, 3);
  Eigen::VectorXcd spec(g.npoints());
  std::copy(F.plane(0), F.plane(0) + g.npoints(), spec.data());
  Fft::instance().forward(g, spec.data());
  double mpts = double(g.npoints());
  double four = spec.squaredNorm() / (mpts * mpts);  // sum of |c_hat_k|^2
  double l2 = l2_inner(id, F, F).real() / vol;
  REQUIRE(std::abs(four - l2) < 1e-12 * four);

  REQUIRE(l2_inner(id, F, F).real() > 0);
}

TEST_CASE("weighted adjointness, constant and variable metrics") {
  for (auto [n, N] : {std::pair{2, 8}, std::pair{3, 4}}) {
    TorusGrid g(n, N);
    MetricSpec sp;
    sp.H = Eigen::MatrixXcd::Identity(n, n);
    sp.kind = MetricSpec::Perturbed;
    sp.seed = 5;
    sp.amplitude = 0.3;
    sp.bandlimit = 1;
    for (const MetricField& w :
         {MetricField::constant(g, random_metric(n, rng(31 + n))),
          sample_metric(g, sp)}) {
      // del: (p,q) -> (p+1,q)
      FormField u = random_field(g, 0, 1, 11, 1.0, N / 2 - 1);
      FormField v = random_field(g, 1, 1, 12, 1.0, N / 2 - 1);
      cplx a = l2_inner(w, del(u), v);
      cplx b = l2_inner(w, u, del_adj(w, v));
      REQUIRE(std::abs(a - b) < 1e-11 * (std::abs(a) + 1));

      cplx c = l2_inner(w, dbar(u), random_field(g, 0, 2, 13, 1.0, 2));
      FormField v2 = random_field(g, 0, 2, 13, 1.0, 2);
      c = l2_inner(w, dbar(u), v2);
      cplx d = l2_inner(w, u, dbar_adj(w, v2));
      REQUIRE(std::abs(c - d) < 1e-11 * (std::abs(c) + 1));

      // ddbar on scalars -> (1,1)
      FormField s = random_field(g, 0, 0, 14, 1.0, N / 2 - 1);
      cplx e = l2_inner(w, ddbar(s), v);
      cplx f = l2_inner(w, s, ddbar_adj(w, v));
      REQUIRE(std::abs(e - f) < 1e-11 * (std::abs(e) + 1));
    }
  }
}

TEST_CASE("continuum adjoint cross-check: del_adj = -star dbar star") {
  for (auto [n, N] : {std::pair{2, 8}, std::pair{3, 4}}) {
    TorusGrid g(n, N);
    MetricField w = MetricField::constant(g, random_metric(n, rng(77 + n)));
    FormField v = random_field(g, 1, 1, 21, 1.0, N / 2 - 2);
    FormField lhs = del_adj(w, v);
    FormField rhs = cplx(-1.0) * star_field(w, dbar(star_field(w, v)));
    REQUIRE((lhs - rhs).norm() < 1e-10 * (lhs.norm() + 1));

    FormField u = random_field(g, 2, 1, 22, 1.0, N / 2 - 2);
    FormField l2 = dbar_adj(w, u);
    FormField r2 = cplx(-1.0) * star_field(w, del(star_field(w, u)));
    REQUIRE((l2 - r2).norm() < 1e-10 * (l2.norm() + 1));
  }
}

TEST_CASE("sample_metric: constant Kaehler, perturbed positivity, conformal") {
  TorusGrid g(2, 8);
  MetricField id = MetricField::constant(g, MetricPoint::identity(2));
  FormField wform = id.form();
  REQUIRE(del(wform).norm() < 1e-12);
  REQUIRE(dbar(wform).norm() < 1e-12);
  FormField wn1 = wedge_power_field(wform, 1);
  REQUIRE(ddbar(wn1).norm() < 1e-12);

  MetricSpec sp;
  sp.kind = MetricSpec::Perturbed;
  sp.H = Eigen::MatrixXcd::Identity(2, 2);
  sp.seed = 1;
  sp.amplitude = 0.2;
  sp.bandlimit = 2;
  MetricField pert = sample_metric(g, sp);
  REQUIRE(pert.min_eigenvalue() >= 0.8 - 1e-12);

  sp.kind = MetricSpec::Conformal;
  MetricField conf = sample_metric(g, sp);
  // conformal of identity: H(x) = e^{sigma} I
  for (long x : {0L, 9L, 200L}) {
    const Eigen::MatrixXcd& H = conf.H(x);
    REQUIRE(std::abs(H(0, 1)) < 1e-14);
    REQUIRE(std::abs(H(0, 0) - H(1, 1)) < 1e-14);
    REQUIRE(H(0, 0).real() > 0);
  }
}

TEST_CASE("integrate_top matches l2 for u ^ star(conj u)") {
  TorusGrid g(2, 6);
  auto& rg = rng(91);
  MetricSpec sp;
  sp.kind = MetricSpec::Perturbed;
  sp.H = random_metric(2, rg).H;
  sp.seed = 3;
  sp.amplitude = 0.2;
  sp.bandlimit = 1;
  MetricField w = sample_metric(g, sp);
  FormField u = random_field(g, 1, 1, 33, 1.0, 2);
  FormField top = wedge_field(u, star_field(w, conj_field(u)));
  cplx lhs = integrate_top(top);
  cplx rhs = l2_inner(w, u, u);
  REQUIRE(std::abs(lhs - rhs) < 1e-10 * (std::abs(rhs) + 1));
}

TEST_CASE("field dump roundtrip") {
  TorusGrid g(2, 6);
  FormField u = random_field(g, 1, 1, 55, 1.0, 2);
  std::string path = "/tmp/gauduchon_dump_test.bin";
  write_field_dump(path, u);
  FormField v = read_field_dump(path);
  REQUIRE(v.p() == 1);
  REQUIRE(v.q() == 1);
  REQUIRE(v.grid() == g);
  REQUIRE((u - v).max_abs() == 0.0);
}
