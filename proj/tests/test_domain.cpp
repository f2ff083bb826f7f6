#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "congesta/domain.hpp"

using namespace congesta;

TEST_CASE("1D partition") {
  Mesh m = build_mesh(1, 64, BoundarySpec::endpoints(1.0, 1.0, 0.5));
  REQUIRE(m.boundary_faces().size() == 2);
  CHECK(m.boundary_faces()[0].inflow);
  CHECK_FALSE(m.boundary_faces()[1].inflow);
  CHECK(m.num_cells() * m.cell_volume() == doctest::Approx(1.0).epsilon(1e-15));

  Mesh z = build_mesh(1, 64, BoundarySpec::endpoints(0.0, 0.0, 1.0));
  CHECK_FALSE(z.has_inflow());
}

TEST_CASE("2D channel partition") {
  BoundarySpec bs;
  bs.dim = 2;
  bs.U0 = {1.0, 0.0};
  Mesh m = build_mesh(2, 8, bs);
  int in = 0, out = 0;
  for (const auto& f : m.boundary_faces()) {
    if (f.inflow) {
      ++in;
      CHECK(f.axis == 0);
      CHECK(f.side == 0);
    } else {
      ++out;
    }
  }
  CHECK(in == 8);
  CHECK(out == 24);
  double vol = 0;
  for (int c = 0; c < m.num_cells(); ++c) vol += m.cell_volume();
  CHECK(vol == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("partition is invariant under refinement") {
  BoundarySpec bs;
  bs.dim = 2;
  bs.U0 = {0.3, -0.2};
  bs.A = {0.5, 0.0, 0.0, 0.1};
  for (int n : {8, 16, 32}) {
    Mesh m = build_mesh(2, n, bs);
    for (const auto& f : m.boundary_faces()) {
      // u_x = 0.3 + 0.5x, u_y = -0.2 + 0.1y: inflow on the left and top edges only
      const bool expect = (f.axis == 0 && f.side == 0) || (f.axis == 1 && f.side == 1);
      CHECK(f.inflow == expect);
    }
  }
}

TEST_CASE("extension of the boundary velocity") {
  Mesh m = build_mesh(1, 16, BoundarySpec::endpoints(1.0, 1.0, 0.5));
  BoundaryData bd = extend_uB(m, BoundarySpec::endpoints(1.0, 1.0, 0.5));
  CHECK(bd.div == 0.0);
  CHECK(bd.velocity({0.37, 0})[0] == doctest::Approx(1.0));

  BoundarySpec inc = BoundarySpec::endpoints(1.0, 2.0, 0.5);
  BoundaryData b2 = extend_uB(build_mesh(1, 16, inc), inc);
  CHECK(b2.div == 1.0);
  CHECK(b2.velocity({0.25, 0})[0] == doctest::Approx(1.25));

  BoundarySpec dec = BoundarySpec::endpoints(2.0, 1.0, 0.5);
  CHECK_THROWS_AS(extend_uB(build_mesh(1, 16, dec), dec), NegativeFlux);

  BoundarySpec bad = BoundarySpec::endpoints(1.0, 1.0, 1.5);
  CHECK_THROWS_AS(extend_uB(build_mesh(1, 16, bad), bad), InvalidBoundarySpec);
}

TEST_CASE("2D extension: flux equals divergence") {
  BoundarySpec bs;
  bs.dim = 2;
  bs.U0 = {0.2, 0.1};
  bs.A = {0.3, 0.4, -0.1, 0.2};
  Mesh m = build_mesh(2, 16, bs);
  BoundaryData bd = extend_uB(m, bs);
  CHECK(bd.total_flux == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(bd.div == doctest::Approx(0.5));
  CHECK(bd.div >= -1e-12);
}

TEST_CASE("mesh errors") {
  CHECK_THROWS_AS(build_mesh(1, 3, BoundarySpec::endpoints(0, 0, 1)), InvalidBoundarySpec);
  CHECK_THROWS_AS(build_mesh(3, 8, BoundarySpec::endpoints(0, 0, 1)), InvalidBoundarySpec);
}

TEST_CASE("initial data validation") {
  InitialData a;
  a.rho0.assign(10, 0.5);
  a.m0.assign(10, 0.0);
  InitialData v = validate_initial(a);
  CHECK(v.M == doctest::Approx(0.5));
  for (double u : v.u0) CHECK(u == 0.0);

  InitialData b = a;
  b.rho0.assign(10, 1.0);
  CHECK_THROWS_AS(validate_initial(b), MassExceedsOne);

  InitialData c = a;
  for (int i = 0; i < 5; ++i) c.rho0[i] = 0.0, c.m0[i] = 0.1;
  CHECK_THROWS_AS(validate_initial(c), MomentumOnVacuum);

  InitialData d = a;
  d.m0[3] = 0.25;
  CHECK(validate_initial(d).u0[3] == doctest::Approx(0.5));
}

TEST_CASE("initial profiles") {
  BoundarySpec bs = BoundarySpec::endpoints(0.0, 0.0, 1.0);
  Mesh m = build_mesh(1, 32, bs);
  BoundaryData bd = extend_uB(m, bs);
  InitialSpec s;
  s.rho_profile = "cosine";
  s.rho_mean = 0.5;
  s.rho_amp = 0.3;
  InitialData d = validate_initial(make_initial(m, bd, s));
  CHECK(d.M == doctest::Approx(0.5).epsilon(1e-14));

  s.rho_profile = "noise";
  s.seed = 42;
  InitialData n1 = make_initial(m, bd, s), n2 = make_initial(m, bd, s);
  CHECK(n1.rho0 == n2.rho0);

  const char* path = "test_domain_rho.csv";
  {
    std::ofstream f(path);
    f << "# density\n";
    for (int c = 0; c < 32; ++c) f << 0.25 << "\n";
  }
  s.rho_profile = "file";
  s.rho_file = path;
  CHECK(make_initial(m, bd, s).rho0[7] == 0.25);
  {
    std::ofstream f(path);
    f << "0.1\nabc\n";
  }
  CHECK_THROWS_AS(make_initial(m, bd, s), ConfigError);
  std::remove(path);
}
