#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "congesta/congestion.hpp"

using namespace congesta;

namespace {

double repeated_squaring(double x, unsigned n) {
  double r = 1.0;
  while (n) {
    if (n & 1u) r *= x;
    x *= x;
    n >>= 1u;
  }
  return r;
}

}  // namespace

TEST_CASE("pressure values") {
  CHECK(CongestionPressure(2).pressure(0.5) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(CongestionPressure(40).pressure(0.9) == doctest::Approx(1.478e-2).epsilon(1e-3));
  const double p = CongestionPressure(40).pressure(1.05);
  CHECK(p == doctest::Approx(7.04).epsilon(1e-3));
  CHECK(std::abs(p - repeated_squaring(1.05, 40)) <= 1e-12 * p);
  CHECK(CongestionPressure(640).pressure(0.0) == 0.0);
  CHECK(std::isfinite(CongestionPressure(1000).pressure(1.5)));
}

TEST_CASE("pressure potential") {
  CHECK(CongestionPressure(2).potential(0.5) == doctest::Approx(0.25));
  CHECK(CongestionPressure(5).potential(1.0) == doctest::Approx(0.25));
  for (double a : {1.5, 2.0, 40.0}) CHECK(CongestionPressure(a).potential(0.0) == 0.0);
  CHECK_THROWS_AS(CongestionPressure(1.0), AlphaTooSmall);
  CHECK_THROWS_AS(CongestionPressure(0.5), AlphaTooSmall);
}

TEST_CASE("potential matches rho * int_0^rho pi(z)/z^2 dz") {
  for (double a : {2.0, 5.0, 10.0}) {
    CongestionPressure cp(a);
    for (double rho : {0.3, 0.8, 1.0, 1.2}) {
      // Simpson on [0, rho]; integrand z^(a-2) is smooth for a >= 2.
      const int n = 20000;
      const double h = rho / n;
      auto f = [&](double z) { return z == 0.0 ? (a == 2.0 ? 1.0 : 0.0) : cp.pressure(z) / (z * z); };
      double s = f(0) + f(rho);
      for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
      const double numeric = rho * s * h / 3.0;
      CHECK(std::abs(numeric - cp.potential(rho)) <= 1e-8 * std::max(1.0, cp.potential(rho)));
    }
  }
}

TEST_CASE("derivatives of the potential and monotonicity") {
  CongestionPressure cp(7.0, {1.0, 0.8});
  for (int cell : {0, 1}) {
    for (double rho : {0.2, 0.7, 1.1}) {
      const double h = 1e-6;
      CHECK((cp.potential(rho + h, cell) - cp.potential(rho - h, cell)) / (2 * h) ==
            doctest::Approx(cp.potential_d1(rho, cell)).epsilon(1e-7));
      CHECK((cp.potential_d1(rho + h, cell) - cp.potential_d1(rho - h, cell)) / (2 * h) ==
            doctest::Approx(cp.potential_d2(rho, cell)).epsilon(1e-7));
    }
    double prev = -1;
    for (double rho = 0; rho < 1.5; rho += 0.01) {
      CHECK(cp.pressure(rho, cell) >= prev);
      prev = cp.pressure(rho, cell);
    }
  }
  CHECK(cp.pressure(0.8, 1) == doctest::Approx(1.0));
}

TEST_CASE("congestion diagnostics") {
  Mesh m = build_mesh(1, 100, BoundarySpec::endpoints(0, 0, 1));
  std::vector<double> div(100, 0.0);
  CongestionPressure cp(40);

  std::vector<double> below(100, 0.95);
  auto r0 = congestion_diagnostics(m, below, div, cp, 0.01);
  CHECK(r0.overshoot_L1 == 0.0);
  CHECK(r0.overshoot_L2 == 0.0);
  CHECK(r0.overshoot_L4 == 0.0);

  std::vector<double> half(100, 0.5);
  for (int c = 0; c < 50; ++c) half[c] = 1.1, div[c] = 2.0;
  auto r1 = congestion_diagnostics(m, half, div, cp, 0.01);
  CHECK(r1.overshoot_L2 == doctest::Approx(0.1 * std::sqrt(0.5)).epsilon(1e-12));
  CHECK(r1.overshoot_L1 == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(r1.congested_divergence == doctest::Approx(2.0 * std::sqrt(0.5)).epsilon(1e-12));
  CHECK(r1.congested_measure == doctest::Approx(0.5));
  const double p11 = std::pow(1.1, 40), p05 = std::pow(0.5, 40);
  CHECK(r1.pressure_mass == doctest::Approx(0.5 * (p11 + p05)).epsilon(1e-12));
  CHECK(r1.complementarity == doctest::Approx(0.5 * (0.1 * p11 + 0.5 * p05)).epsilon(1e-12));
  CHECK(r1.theta == doctest::Approx((0.5 - 1.0 / 40) / (1 - 1.0 / 40)));
}
