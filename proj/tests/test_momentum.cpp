#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "congesta/momentum.hpp"

using namespace congesta;

namespace {

constexpr double kPi = std::numbers::pi;

struct Problem {
  BoundarySpec bs;
  Mesh mesh;
  BoundaryData bd;
  GalerkinBasis basis;
  MollifiedPotential pot;
  CongestionPressure cp;
  ContinuitySolver cont;
  MomentumSolver mom;
  Problem(const BoundarySpec& b, int N, int n, int qp, const PotentialSpec& ps, double delta, double alpha, double eps,
          ExecPolicy pol = ExecPolicy::kParallel)
      : bs(b),
        mesh(build_mesh(b.dim, N, b)),
        bd(extend_uB(mesh, b)),
        basis(mesh, n, qp),
        pot(ps, delta),
        cp(alpha),
        cont(mesh, bd, eps),
        mom(mesh, basis, bd, pot, cp, eps, pol) {}
};

PotentialSpec quadratic_1d() { return {1.0, 0.0, 0.5, 0.0, 2.0}; }

}  // namespace

TEST_CASE("basis is orthonormal and vanishes on the boundary") {
  Mesh m1 = build_mesh(1, 256, BoundarySpec::endpoints(0, 0, 1));
  GalerkinBasis b1(m1, 6, 4);
  CHECK((b1.gram() - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-10);
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(b1.eval_phi(i, {0.0, 0.0})) < 1e-14);
    CHECK(std::abs(b1.eval_phi(i, {1.0, 0.0})) < 1e-13);
  }
  BoundarySpec s2;
  s2.dim = 2;
  Mesh m2 = build_mesh(2, 64, s2);
  GalerkinBasis b2(m2, 10, 4);
  CHECK((b2.gram() - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(b2.mode(0).component == 0);
  CHECK(b2.mode(1).component == 1);
  CHECK(b2.mode(0).kx == 1);
  CHECK(b2.mode(0).ky == 1);
  for (int i = 0; i < 10; ++i)
    for (double s : {0.0, 0.3, 0.77}) {
      CHECK(std::abs(b2.eval_phi(i, {0.0, s})) < 1e-13);
      CHECK(std::abs(b2.eval_phi(i, {s, 1.0})) < 1e-13);
    }
}

TEST_CASE("face fluxes of modes are exact face integrals") {
  BoundarySpec s2;
  s2.dim = 2;
  Mesh m = build_mesh(2, 8, s2);
  GalerkinBasis b(m, 6, 3);
  const auto& faces = m.interior_faces();
  for (int i = 0; i < 6; ++i) {
    for (std::size_t f = 0; f < faces.size(); f += 7) {
      const int axis = faces[f].axis, other = 1 - axis;
      // 2000-point midpoint rule along the face
      double s = 0;
      const int K = 2000;
      for (int k = 0; k < K; ++k) {
        Vec2 x = faces[f].center;
        x[other] += m.h() * ((k + 0.5) / K - 0.5);
        s += (b.mode(i).component == axis ? b.eval_phi(i, x) : 0.0) * m.h() / K;
      }
      CHECK(std::abs(s - b.face_flux(i, static_cast<int>(f))) < 1e-7);
    }
  }
}

TEST_CASE("projection") {
  Mesh m = build_mesh(1, 128, BoundarySpec::endpoints(0, 0, 1));
  GalerkinBasis b(m, 5, 4);
  Eigen::VectorXd c3 = b.project([&](const Vec2& x) { return Vec2{b.eval_phi(2, x), 0}; });
  for (int i = 0; i < 5; ++i) CHECK(std::abs(c3[i] - (i == 2 ? 1.0 : 0.0)) < 1e-10);
  Eigen::VectorXd c = b.project([&](const Vec2& x) { return Vec2{2 * b.eval_phi(0, x) + 3 * b.eval_phi(1, x), 0}; });
  CHECK(std::abs(c[0] - 2) < 1e-10);
  CHECK(std::abs(c[1] - 3) < 1e-10);
  for (int i = 2; i < 5; ++i) CHECK(std::abs(c[i]) < 1e-10);

  BoundarySpec bs = BoundarySpec::endpoints(1.0, 2.0, 0.5);
  Eigen::VectorXd s = b.project([&](const Vec2& x) { return Vec2{1.0 + x[0], 0}; });
  CHECK(s.norm() > 0.1);
  Eigen::VectorXd again = b.project([&](const Vec2& x) {
    double v = 0;
    for (int i = 0; i < 5; ++i) v += s[i] * b.eval_phi(i, x);
    return Vec2{v, 0};
  });
  CHECK((again - s).norm() < 1e-12);
}

TEST_CASE("single-mode heat decay matches exp(-pi^2 t)") {
  const auto start = std::chrono::steady_clock::now();
  Problem p(BoundarySpec::endpoints(0, 0, 1), 256, 1, 4, quadratic_1d(), 0.0, 2.0, 0.01);
  std::vector<double> rho(256, 1.0 - 1e-12);
  Eigen::VectorXd v(1);
  v[0] = 1.0;
  CouplerOptions opts;
  opts.freeze_density = true;
  for (int k = 0; k < 1000; ++k) v = fixed_point_coupler(p.cont, p.mom, rho, v, 1e-3, opts).v;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(std::abs(v[0] - std::exp(-kPi * kPi)) <= 1e-4);
  CHECK(secs <= 5.0);
}

TEST_CASE("rigid uniform state does not move") {
  Problem p(BoundarySpec::endpoints(0.6, 0.6, 0.5), 64, 4, 4, quadratic_1d(), 0.0, 2.0, 0.01);
  std::vector<double> rho(64, 0.5);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(4);
  CouplerOptions opts;
  for (int k = 0; k < 20; ++k) {
    CoupledStep s = fixed_point_coupler(p.cont, p.mom, rho, v, 1e-2, opts);
    CHECK(s.iterations == 1);
    v = s.v;
    rho = s.rho;
  }
  CHECK(v.norm() < 1e-12);
  for (double r : rho) CHECK(std::abs(r - 0.5) < 1e-13);
}

TEST_CASE("serial and parallel assembly agree") {
  BoundarySpec bs;
  bs.dim = 2;
  bs.U0 = {0.3, 0.1};
  bs.A = {0.2, 0.1, 0.0, 0.1};
  bs.rhoB = 0.7;
  PotentialSpec ps{1.0, 0.01, 0.3, 0.01, 1.5};
  Problem par(bs, 16, 8, 3, ps, 1e-2, 10.0, 0.02, ExecPolicy::kParallel);
  Problem ser(bs, 16, 8, 3, ps, 1e-2, 10.0, 0.02, ExecPolicy::kSerial);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.3, 0.9);
  std::vector<double> r0(par.mesh.num_cells()), r1(par.mesh.num_cells());
  for (auto& r : r0) r = u(rng);
  for (auto& r : r1) r = u(rng);
  Eigen::VectorXd v0 = Eigen::VectorXd::Random(8) * 0.2, v1 = Eigen::VectorXd::Random(8) * 0.2;
  std::vector<PointState> pts;
  par.mom.sample(r0, v0, r1, v1, pts);
  Assembly a, b;
  assemble(par.basis, pts, par.pot, true, ExecPolicy::kParallel, a);
  assemble(ser.basis, pts, ser.pot, true, ExecPolicy::kSerial, b);
  auto close = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    return (x - y).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + y.cwiseAbs().maxCoeff());
  };
  CHECK(close(a.old_momentum, b.old_momentum));
  CHECK(close(a.boundary_momentum, b.boundary_momentum));
  CHECK(close(a.convection, b.convection));
  CHECK(close(a.viscous, b.viscous));
  CHECK(close(a.eps_term, b.eps_term));
  CHECK(close(a.mass, b.mass));
  CHECK(close(a.stiffness, b.stiffness));
  CHECK((a.mass - a.mass.transpose()).norm() < 1e-14);

  Eigen::VectorXd x = par.mom.update(r0, v0, r1, v1, 1e-2);
  Eigen::VectorXd y = ser.mom.update(r0, v0, r1, v1, 1e-2);
  CHECK((x - y).norm() <= 1e-12 * (1 + y.norm()));
}

TEST_CASE("two-mode nonlinear run is first order in dt") {
  PotentialSpec ps{1.0, 0.0, 0.4, 0.0, 1.5};
  auto run = [&](double dt) {
    Problem p(BoundarySpec::endpoints(0, 0, 1), 64, 2, 4, ps, 1e-2, 10.0, 0.01);
    std::vector<double> rho(64, 0.6);
    Eigen::VectorXd v(2);
    v << 0.3, -0.2;
    const int steps = static_cast<int>(std::lround(0.2 / dt));
    CouplerOptions opts;
    for (int k = 0; k < steps; ++k) {
      CoupledStep s = fixed_point_coupler(p.cont, p.mom, rho, v, dt, opts);
      rho = s.rho;
      v = s.v;
    }
    return v;
  };
  const Eigen::VectorXd a = run(4e-3), b = run(2e-3), c = run(1e-3);
  const double ratio = (a - b).norm() / (b - c).norm();
  CHECK(ratio >= 1.9);
}

TEST_CASE("tolerance robustness and iteration counts") {
  PotentialSpec ps{1.0, 0.0, 0.4, 0.0, 1.5};
  auto run = [&](double tol, int* max_it) {
    Problem p(BoundarySpec::endpoints(0, 0, 1), 128, 8, 4, ps, 1e-2, 10.0, 0.01);
    std::vector<double> rho(128, 0.6);
    Eigen::VectorXd v = p.basis.project([](const Vec2& x) { return Vec2{0.1 * std::sin(2 * kPi * x[0]), 0}; });
    CouplerOptions opts;
    opts.tol = tol;
    *max_it = 0;
    for (int k = 0; k < 100; ++k) {
      CoupledStep s = fixed_point_coupler(p.cont, p.mom, rho, v, 1e-3, opts);
      rho = s.rho;
      v = s.v;
      *max_it = std::max(*max_it, s.iterations);
    }
    return v;
  };
  int it_tight = 0, it_loose = 0;
  const Eigen::VectorXd a = run(1e-12, &it_tight), b = run(1e-8, &it_loose);
  CHECK((a - b).norm() <= 1e-7);
  CHECK(it_loose <= 6);
}

TEST_CASE("closed 1D frozen density: discrete kinetic energy balance") {
  PotentialSpec ps{1.0, 0.0, 0.3, 0.0, 1.5};
  Problem p(BoundarySpec::endpoints(0, 0, 1), 128, 4, 4, ps, 1e-2, 2.0, 0.01);
  std::vector<double> rho(128, 1.0 - 1e-12);
  Eigen::VectorXd v(4);
  v << 0.5, -0.3, 0.2, 0.1;
  CouplerOptions opts;
  opts.freeze_density = true;
  opts.tol = 1e-13;
  const double dt = 1e-3;
  for (int k = 0; k < 50; ++k) {
    CoupledStep s = fixed_point_coupler(p.cont, p.mom, rho, v, dt, opts);
    std::vector<PointState> pts;
    p.mom.sample(rho, v, rho, s.v, pts);
    double pairing = 0, primal = 0;
    for (int q = 0; q < p.basis.num_points(); ++q) {
      const double w = p.basis.points()[q].weight;
      pairing += w * contract(pts[q].S, pts[q].D);
      primal += w * p.pot.eval(pts[q].D);
    }
    const double m = 1.0 - 1e-12;  // frozen density; the Gram matrix is the identity
    const double dE = 0.5 * m * (s.v.squaredNorm() - v.squaredNorm());
    const double numerical = 0.5 * m * (s.v - v).squaredNorm();
    CHECK(std::abs(dE + numerical + dt * pairing) <= 1e-9);
    CHECK(std::abs(dE / dt + pairing) <= 1e-6 + numerical / dt);
    CHECK(pairing >= primal);
    CHECK(primal >= 0.0);
    v = s.v;
  }
}
