#include "congesta/energy.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

namespace congesta {

double EnergyLedger::lhs_rate() const {
  return dissipation_pairing + boundary_out + boundary_in_bregman + eps_entropy + eps_coupling;
}

double EnergyLedger::rhs_rate() const {
  return rhs_convective + rhs_pressure + rhs_transport + rhs_stress + rhs_inflow;
}

namespace {

// v(x_q) = sum_i v_i w_i(x_q)
Vec2 mode_sum(const GalerkinBasis& basis, const Eigen::VectorXd& v, int q) {
  Vec2 out{0.0, 0.0};
  for (int i = 0; i < basis.size(); ++i) out[basis.mode(i).component] += v[i] * basis.phi(i, q);
  return out;
}

double bregman(const CongestionPressure& cp, double a, double b, int cell) {
  // Pi(a) - Pi(b) - Pi'(b)(a - b) >= 0
  return std::max(0.0, cp.potential(a, cell) - cp.potential(b, cell) - cp.potential_d1(b, cell) * (a - b));
}

}  // namespace

EnergyState energy_state(const GalerkinBasis& basis, const CongestionPressure& cp, const Mesh& mesh,
                         const std::vector<double>& rho, const Eigen::VectorXd& v) {
  EnergyState e;
  for (int q = 0; q < basis.num_points(); ++q) {
    const QuadPoint& p = basis.points()[q];
    const Vec2 w = mode_sum(basis, v, q);
    e.kinetic += 0.5 * p.weight * rho[p.cell] * (w[0] * w[0] + w[1] * w[1]);
  }
  for (int c = 0; c < mesh.num_cells(); ++c) e.pressure_potential += mesh.cell_volume() * cp.potential(rho[c], c);
  return e;
}

void recompute_residuals(EnergyLedger& L) {
  L.residual = L.energy_change + L.dt * L.lhs_rate() - L.dt * L.rhs_rate();
  L.residual_dual = L.residual + L.dt * (L.dissipation_primal + L.dissipation_dual - L.dissipation_pairing);
}

EnergyLedger assemble_ledger(const Mesh& mesh, const GalerkinBasis& basis, const BoundaryData& bd,
                             const MollifiedPotential& pot, const CongestionPressure& cp, double eps,
                             const StepFields& step, ExecPolicy policy) {
  const auto& rho0 = *step.rho_old;
  const auto& rho1 = *step.rho_new;
  const auto& pts = *step.pts;
  const int Q = basis.num_points();
  const int d = mesh.dim();
  if (static_cast<int>(pts.size()) != Q) throw DimensionMismatch("energy: point state count does not match quadrature");
  const double dt = step.dt;

  EnergyLedger L;
  L.t = step.t;
  L.dt = dt;
  const EnergyState before = energy_state(basis, cp, mesh, rho0, *step.v_old);
  const EnergyState after = energy_state(basis, cp, mesh, rho1, *step.v_new);
  L.kinetic = after.kinetic;
  L.pressure_potential = after.pressure_potential;
  L.energy = after.total();
  L.energy_change = after.total() - before.total();

  double guB[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) guB[a][b] = bd.spec.grad(a, b);
  double sym[4];
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) sym[a * d + b] = guB[a][b];
  const SymTensor DuB = SymTensor::sym_part(d, sym);

  // Per-point integrands; summed serially afterwards so the result does not depend on threads.
  constexpr int kCols = 9;
  std::vector<double> col(std::size_t(Q) * kCols, 0.0);
  std::exception_ptr err;
#pragma omp parallel for schedule(static) if (policy == ExecPolicy::kParallel)
  for (int q = 0; q < Q; ++q) {
    try {
      const PointState& p = pts[q];
      const double w = basis.points()[q].weight;
      const DualPair dp = pot.fenchel_gap(p.D, p.S);
      double conv = 0.0, transport = 0.0, coupling = 0.0;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          conv += p.u[a] * p.u[b] * guB[a][b];
          transport += p.uB[a] * p.u[b] * guB[a][b];
          coupling += p.grad_rho[b] * p.uB[a] * (p.grad_u[a * 2 + b] - guB[a][b]);
        }
      const Vec2 dv = mode_sum(basis, *step.v_new - *step.v_old, q);
      double* c = &col[std::size_t(q) * kCols];
      c[0] = w * dp.F_value;
      c[1] = w * dp.Fstar_value;
      c[2] = w * contract(p.S, p.D);
      c[3] = -w * p.rho_new * conv;
      c[4] = w * p.rho_new * transport;
      c[5] = w * contract(p.S, DuB);
      c[6] = -eps * w * coupling;
      c[7] = 0.5 * w * p.rho_old * (dv[0] * dv[0] + dv[1] * dv[1]);
      c[8] = dp.gap;
    } catch (...) {
#pragma omp critical(congesta_energy_error)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);

  L.min_point_gap = std::numeric_limits<double>::infinity();
  L.max_point_gap = -std::numeric_limits<double>::infinity();
  for (int q = 0; q < Q; ++q) {
    const double* c = &col[std::size_t(q) * kCols];
    L.dissipation_primal += c[0];
    L.dissipation_dual += c[1];
    L.dissipation_pairing += c[2];
    L.rhs_convective += c[3];
    L.rhs_transport += c[4];
    L.rhs_stress += c[5];
    L.eps_coupling += c[6];
    L.num_kinetic += c[7];
    L.min_point_gap = std::min(L.min_point_gap, c[8]);
    L.max_point_gap = std::max(L.max_point_gap, c[8]);
  }
  if (Q == 0) L.min_point_gap = L.max_point_gap = 0.0;

  const double vol = mesh.cell_volume();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    L.rhs_pressure -= vol * cp.pressure(rho1[c], c) * bd.div;
    L.num_potential += vol * bregman(cp, rho0[c], rho1[c], c);
  }

  const double coef = eps * mesh.face_area() / mesh.h();
  const auto& inner = mesh.interior_faces();
  for (std::size_t f = 0; f < inner.size(); ++f) {
    const int l = inner[f].left, r = inner[f].right;
    L.eps_entropy += coef * (cp.potential_d1(rho1[r], r) - cp.potential_d1(rho1[l], l)) * (rho1[r] - rho1[l]);
    const double a = step.fluxes->interior[f];
    if (a >= 0.0) L.num_upwind += dt * a * bregman(cp, rho1[l], rho1[r], r);
    else L.num_upwind += dt * (-a) * bregman(cp, rho1[r], rho1[l], l);
  }
  const auto& bnd = mesh.boundary_faces();
  for (std::size_t f = 0; f < bnd.size(); ++f) {
    const int c = bnd[f].cell;
    const double a = step.fluxes->boundary[f];
    if (a >= 0.0) {
      L.boundary_out += cp.potential(rho1[c], c) * a;
    } else {
      const double gap = cp.potential(bd.rhoB, c) - cp.potential_d1(rho1[c], c) * (bd.rhoB - rho1[c]) -
                         cp.potential(rho1[c], c);
      L.boundary_in_bregman += gap * (-a);
      L.rhs_inflow -= cp.potential(bd.rhoB, c) * a;
    }
  }

  recompute_residuals(L);
  return L;
}

EnergyVerdict assert_energy_inequality(const std::vector<EnergyLedger>& rows, double initial_energy, double tol) {
  EnergyVerdict v;
  v.tol = tol;
  v.initial_energy = initial_energy;
  v.min_point_gap = rows.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  double worst = rows.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
  double worst_pair = worst;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (v.worst_step < 0 || rows[k].residual_dual > worst) {
      worst = rows[k].residual_dual;
      v.worst_step = static_cast<int>(k);
    }
    worst_pair = std::max(worst_pair, rows[k].residual);
    v.min_point_gap = std::min(v.min_point_gap, rows[k].min_point_gap);
    if (!std::isfinite(rows[k].residual_dual)) v.pass = false;
  }
  v.max_residual = worst;
  v.max_residual_pairing = worst_pair;
  v.margin = worst == 0.0 ? 0.0 : -worst;
  if (!(worst <= tol * (1.0 + initial_energy))) v.pass = false;
  return v;
}

void check_fenchel_floor(const std::vector<EnergyLedger>& rows, double floor) {
  for (std::size_t k = 0; k < rows.size(); ++k)
    if (rows[k].min_point_gap < -floor)
      throw FenchelYoungViolated("energy: Fenchel-Young gap " + std::to_string(rows[k].min_point_gap) + " at step " +
                                 std::to_string(k));
}

}  // namespace congesta
