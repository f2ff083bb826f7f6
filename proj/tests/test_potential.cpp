#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "congesta/potential.hpp"

using namespace congesta;

namespace {

PotentialSpec quadratic() { return {1.0, 0.0, 0.0, 0.0, 2.0}; }
PotentialSpec trace_only(double q) { return {1e-300, 0.0, 1.0, 0.0, q}; }

SymTensor random_tensor(std::mt19937_64& rng, int d, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  SymTensor t(d);
  for (int c = 0; c < t.size(); ++c) t.component(c) = u(rng);
  return t;
}

// Simpson rule with many panels; independent of the library quadrature.
template <class F>
double simpson(F f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("eval_F examples") {
  MollifiedPotential p(quadratic(), 0.0);
  CHECK(p.eval(SymTensor::diag({1, -1})) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.eval(SymTensor(2)) == 0.0);
  MollifiedPotential t(trace_only(1.5), 0.0);
  CHECK(t.eval(SymTensor::diag({4})) == doctest::Approx(8.0).epsilon(1e-14));
  MollifiedPotential m({2.0, 0.3, 0.7, 0.2, 1.5}, 0.05);
  CHECK(std::abs(m.eval(SymTensor(2))) < 1e-14);
}

TEST_CASE("subgradient examples") {
  MollifiedPotential p(quadratic(), 0.0);
  SymTensor s = p.subgradient(SymTensor::diag({1, -1})).stress;
  CHECK(s(0, 0) == doctest::Approx(1.0));
  CHECK(s(1, 1) == doctest::Approx(-1.0));
  CHECK(s(0, 1) == 0.0);
  CHECK(p.subgradient(SymTensor(2)).stress.norm() == 0.0);

  MollifiedPotential t(trace_only(1.5), 0.0);
  const SymTensor D = SymTensor::diag({4});
  const double fd = (t.eval(SymTensor::diag({4 + 1e-6})) - t.eval(SymTensor::diag({4 - 1e-6}))) / 2e-6;
  CHECK(t.subgradient(D).stress(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(fd - 3.0) < 1e-5);
}

TEST_CASE("kink flagging and non-smooth Hessian") {
  MollifiedPotential p({1.0, 0.0, 0.0, 0.0, 1.5}, 0.0);
  auto sg = p.subgradient(SymTensor(2));
  CHECK(sg.singular);
  CHECK(sg.stress.norm() == 0.0);
  CHECK_THROWS_AS(p.tangent(SymTensor(2), SymTensor::diag({1, -1})), NonSmoothPoint);
  MollifiedPotential m({1.0, 0.0, 0.0, 0.0, 1.5}, 1e-2);
  CHECK_FALSE(m.subgradient(SymTensor(2)).singular);
  CHECK(std::isfinite(m.tangent(SymTensor(2), SymTensor::diag({1, -1})).norm()));
}

TEST_CASE("conjugate examples") {
  MollifiedPotential p({1.0, 0.0, 0.5, 0.0, 2.0}, 0.0);
  CHECK(p.conjugate(SymTensor::diag({1, -1})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.conjugate(SymTensor(2)) == 0.0);

  // phi(t) = t^{3/2} / (3/2): conjugate at s = 3 is 3^3/3 = 9.
  RadialProfile phi(1.0 / 1.5, 0.0, 1.5, 0.0);
  CHECK(phi.conjugate(3.0) == doctest::Approx(9.0).epsilon(1e-12));
  double best = -1e300;
  for (long i = 0; i <= 1000000; ++i) {
    const double t = i * 1e-4;
    best = std::max(best, 3.0 * t - t * std::sqrt(t) / 1.5);
  }
  CHECK(std::abs(best - 9.0) < 1e-4);
  CHECK(std::abs(phi.conjugate(3.0) - best) < 1e-4);
}

TEST_CASE("conjugate overflow and zero profile") {
  RadialProfile phi(1.0, 0.0, 1.01, 0.0);
  CHECK_THROWS_AS(phi.conjugate(1e6), ConjugateOverflow);
  RadialProfile zero(0.0, 0.0, 2.0, 0.0);
  CHECK(std::isinf(zero.conjugate(1.0)));
  CHECK(zero.conjugate(0.0) == 0.0);
}

TEST_CASE("closed-form conjugate of pure powers") {
  for (double q : {1.5, 2.0, 3.0}) {
    for (double a : {0.5, 1.0, 4.0}) {
      RadialProfile phi(a / q, 0.0, q, 0.0);
      const double qp = q / (q - 1.0);
      for (double s = 1e-2; s <= 1e2; s *= 1.7) {
        const double exact = std::pow(a, 1.0 - qp) * std::pow(s, qp) / qp;
        CHECK(std::abs(phi.conjugate(s) - exact) <= 1e-10 * exact);
      }
    }
  }
}

TEST_CASE("fenchel gap examples") {
  MollifiedPotential p(quadratic(), 0.0);
  const SymTensor D = SymTensor::diag({1, -1});
  auto dp = p.fenchel_gap(D, p.subgradient(D).stress);
  CHECK(std::abs(dp.gap) < 1e-9);
  auto zero = p.fenchel_gap(D, SymTensor(2));
  CHECK(zero.gap == doctest::Approx(1.0));

  std::mt19937_64 rng(11);
  MollifiedPotential r({1.0, 0.0, 0.5, 0.0, 1.5}, 0.0);
  for (int k = 0; k < 1000; ++k) {
    SymTensor X = random_tensor(rng, 2, 5.0 / std::sqrt(3.0));
    auto g = r.fenchel_gap(X, r.subgradient(X).stress);
    CHECK(g.gap <= 1e-5);
    CHECK(g.gap >= -1e-8);
  }
}

TEST_CASE("mollified profile: derivatives match finite differences") {
  for (double b : {0.0, 1e-4, 0.3}) {
    for (double delta : {1e-3, 1e-2, 0.2}) {
      RadialProfile phi(0.7, b, 1.5, delta);
      CHECK(std::abs(phi.value(0.0)) < 1e-14);
      for (double t : {0.0005, 0.01, 0.3, 1.0, 4.0}) {
        const double h = 1e-5 * std::max(t, delta);
        const double fd1 = (phi.value(t + h) - phi.value(t - h)) / (2 * h);
        const double fd2 = (phi.d1(t + h) - phi.d1(t - h)) / (2 * h);
        CHECK(fd1 == doctest::Approx(phi.d1(t)).epsilon(1e-5));
        CHECK(fd2 == doctest::Approx(phi.d2(t)).epsilon(1e-4));
      }
    }
  }
}

TEST_CASE("mollified profile equals the box average of the raw profile (1D convolution oracle)") {
  for (double b : {0.0, 2e-4, 0.5}) {
    const double c = 1.3, q = 1.5, delta = 0.05;
    RadialProfile phi(c, b, q, delta);
    auto g = [&](double y) { return c * std::pow(b + y * y, 0.5 * q); };
    const double offset = simpson(g, -delta, delta) / (2 * delta);
    for (double t : {0.0, 0.02, 0.3, 2.5}) {
      const double ref = simpson(g, t - delta, t + delta) / (2 * delta) - offset;
      CHECK(std::abs(phi.value(t) - ref) < 1e-11 * (1 + std::abs(ref)));
    }
  }
}

TEST_CASE("properties: convexity, growth floor, gradient consistency") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lam(0, 1);
  for (double delta : {0.0, 1e-3, 1e-2, 1e-1}) {
    for (double q : {1.5, 2.0, 3.0}) {
      MollifiedPotential p({1.2, 0.1, 0.4, 0.05, q}, delta);
      for (int k = 0; k < 300; ++k) {
        SymTensor A = random_tensor(rng, 2, 3.0), B = random_tensor(rng, 2, 3.0);
        const double l = lam(rng);
        CHECK(p.eval(l * A + (1 - l) * B) <= l * p.eval(A) + (1 - l) * p.eval(B) + 1e-10);
        if (A.norm() > 1.0) CHECK(p.eval(A) >= p.growth_floor(A));
        // directional finite difference of F versus S:E
        SymTensor E = random_tensor(rng, 2, 1.0);
        const double h = 1e-6;
        const double fd = (p.eval(A + h * E) - p.eval(A - h * E)) / (2 * h);
        const double an = contract(p.subgradient(A).stress, E);
        CHECK(std::abs(fd - an) <= 1e-5 * (1 + std::abs(an)));
      }
    }
  }
}

TEST_CASE("tangent matches finite differences of the subgradient") {
  std::mt19937_64 rng(5);
  MollifiedPotential p({1.0, 0.05, 0.3, 0.02, 1.5}, 1e-2);
  for (int k = 0; k < 200; ++k) {
    SymTensor A = random_tensor(rng, 2, 2.0), E = random_tensor(rng, 2, 1.0);
    const double h = 1e-6;
    SymTensor fd = (1.0 / (2 * h)) * (p.subgradient(A + h * E).stress - p.subgradient(A - h * E).stress);
    SymTensor an = p.tangent(A, E);
    CHECK((fd - an).norm() <= 1e-5 * (1 + an.norm()));
  }
}

TEST_CASE("biconjugation recovers the profile") {
  for (double delta : {0.0, 1e-2}) {
    RadialProfile phi(0.8, 0.0, 1.5, delta);
    for (double t : {0.1, 0.5, 1.0, 2.0}) {
      double best = -1e300;
      for (int i = 0; i <= 40000; ++i) {
        const double s = i * 1e-4;
        best = std::max(best, s * t - phi.conjugate(s));
      }
      CHECK(std::abs(best - phi.value(t)) < 2e-4);
    }
  }
}
