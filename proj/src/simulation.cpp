#include "congesta/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace congesta {

CongestionPressure make_pressure(const RunConfig& cfg, const Mesh& mesh) {
  const CongestionConfig& g = cfg.congestion;
  if (!g.rho_star_file.empty()) {
    std::vector<double> star = read_cell_values(g.rho_star_file);
    if (static_cast<int>(star.size()) != mesh.num_cells())
      throw ConfigError("congestion: rho_star_file has " + std::to_string(star.size()) + " values, the mesh has " +
                        std::to_string(mesh.num_cells()) + " cells");
    for (double s : star)
      if (!(s > 0.0)) throw ConfigError("congestion: rho_star values must be > 0");
    return CongestionPressure(g.alpha, std::move(star));
  }
  if (g.rho_star == 1.0) return CongestionPressure(g.alpha);
  return CongestionPressure(g.alpha, std::vector<double>(mesh.num_cells(), g.rho_star));
}

Simulation::Simulation(const RunConfig& cfg, ExecPolicy policy, bool with_initial)
    : cfg_(cfg),
      policy_(policy),
      mesh_(build_mesh(cfg.dim, cfg.scheme.resolution, cfg.boundary)),
      bd_(extend_uB(mesh_, cfg.boundary)),
      basis_(mesh_, cfg.scheme.modes, cfg.scheme.quad_points),
      pot_(cfg.potential, cfg.delta),
      cp_(make_pressure(cfg, mesh_)),
      cont_(mesh_, bd_, cfg.scheme.eps),
      mom_(mesh_, basis_, bd_, pot_, cp_, cfg.scheme.eps, policy) {
  if (!with_initial) {
    v0_ = Eigen::VectorXd::Zero(basis_.size());
    return;
  }
  InitialData init = validate_initial(make_initial(mesh_, bd_, cfg.initial));
  rho0_ = init.rho0;
  const InitialSpec& in = cfg.initial;
  const int d = cfg.dim;
  if (in.velocity_profile == "file") {
    // cellwise u0 minus the extension, sampled at every quadrature point
    std::vector<double> w(std::size_t(basis_.num_points()) * d);
    for (int q = 0; q < basis_.num_points(); ++q) {
      const QuadPoint& p = basis_.points()[q];
      const Vec2 ub = bd_.velocity(p.x);
      for (int a = 0; a < d; ++a) w[std::size_t(q) * d + a] = init.u0[std::size_t(p.cell) * d + a] - ub[a];
    }
    v0_ = basis_.project_points(w);
  } else {
    const double amp = in.velocity_profile == "sine" ? in.u_amp : 0.0;
    const int comp = std::min(in.u_component, d - 1);
    v0_ = basis_.project([&](const Vec2& x) {
      double shape = std::sin(in.u_mode * std::numbers::pi * x[0]);
      if (d == 2) shape *= std::sin(in.u_mode * std::numbers::pi * x[1]);
      Vec2 u{0.0, 0.0};
      u[comp] = amp * shape;
      return u;
    });
  }
}

std::vector<double> Simulation::divergence(const Eigen::VectorXd& v) const {
  return discrete_divergence(mesh_, mom_.face_fluxes(v));
}

void Simulation::commit(const std::vector<double>& rho_old, const Eigen::VectorXd& v_old, const CoupledStep& s,
                        double t, double dt, int depth, int nominal, RunRecord& rec) {
  const double mass = total_mass(mesh_, s.rho);
  ContinuityRow cr;
  cr.step = nominal;
  cr.t = t;
  cr.dt = dt;
  cr.mass = mass;
  cr.inflow = s.mass_fluxes.inflow;
  cr.outflow = s.mass_fluxes.outflow;
  cr.diffusive = s.mass_fluxes.diffusive;
  cr.closure = ledger_->record(mass, s.mass_fluxes);
  cr.drift = ledger_->cumulative_drift();
  if (!cfg_.scheme.freeze_density && std::abs(cr.closure) > 1e-10 * std::max(1.0, mass))
    throw MassLedgerViolated("mass ledger closure " + std::to_string(cr.closure) + " at t = " + std::to_string(t));

  tracker_->record(s.rho, discrete_divergence(mesh_, s.fluxes), dt);
  tracker_->check();
  cr.sup_rho = tracker_->sup_rho();
  cr.inf_rho = tracker_->inf_rho();
  cr.bound = tracker_->bound();
  cr.formula_bound = tracker_->formula_bound();
  cr.renorm_entropy = cfg_.scheme.freeze_density
                          ? 0.0
                          : renormalized_residual(mesh_, bd_, cfg_.scheme.eps, rho_old, s.rho, s.fluxes, dt,
                                                  Renormalization::entropy())
                                .residual;
  rec.continuity.push_back(cr);
  rec.max_closure = std::max(rec.max_closure, std::abs(cr.closure));

  std::vector<PointState> pts;
  mom_.sample(rho_old, v_old, s.rho, s.v, pts);
  if (ledger_stress_scale_ != 1.0)
    for (PointState& p : pts) p.S = p.S * ledger_stress_scale_;
  StepFields f{&rho_old, &s.rho, &v_old, &s.v, &pts, &s.fluxes, dt, t};
  EnergyLedger L = assemble_ledger(mesh_, basis_, bd_, pot_, cp_, cfg_.scheme.eps, f, policy_);
  check_fenchel_floor({L});
  rec.energy.push_back(L);

  const std::vector<double> div = divergence(s.v);
  const CongestionReport cong = congestion_diagnostics(mesh_, s.rho, div, cp_, cfg_.scheme.tau_c);
  MomentumRow mr;
  mr.step = nominal;
  mr.t = t;
  mr.dt = dt;
  mr.iterations = s.iterations;
  mr.halvings = depth;
  mr.kinetic = L.kinetic;
  mr.v_norm = s.v.norm();
  for (double x : div) mr.max_div = std::max(mr.max_div, std::abs(x));
  mr.overshoot_L2 = cong.overshoot_L2;
  mr.complementarity = cong.complementarity;
  mr.congested_divergence = cong.congested_divergence;
  mr.overshoot_L1 = cong.overshoot_L1;
  mr.overshoot_L4 = cong.overshoot_L4;
  mr.pressure_mass = cong.pressure_mass;
  mr.congested_pairing = cong.congested_pairing;
  rec.momentum.push_back(mr);
  rec.complementarity_integral += dt * cong.complementarity;
  rec.overshoot_L2_max = std::max(rec.overshoot_L2_max, cong.overshoot_L2);
  rec.congested_divergence_L2t += dt * cong.congested_divergence * cong.congested_divergence;
  rec.max_iterations = std::max(rec.max_iterations, s.iterations);
  rec.halvings = std::max(rec.halvings, depth);
  ++rec.steps;
}

void Simulation::advance(std::vector<double>& rho, Eigen::VectorXd& v, double& t, double dt, int depth, int nominal,
                         RunRecord& rec) {
  CouplerOptions opts;
  opts.tol = cfg_.scheme.tol;
  opts.max_iter = cfg_.scheme.max_iter;
  opts.freeze_density = cfg_.scheme.freeze_density;
  CoupledStep s;
  try {
    s = fixed_point_coupler(cont_, mom_, rho, v, dt, opts);
  } catch (const Error& e) {
    if (e.kind() != FailureKind::kSolver || depth >= cfg_.scheme.max_halvings) throw;
    advance(rho, v, t, 0.5 * dt, depth + 1, nominal, rec);
    advance(rho, v, t, 0.5 * dt, depth + 1, nominal, rec);
    return;
  }
  const double t_new = t + dt;
  commit(rho, v, s, t_new, dt, depth, nominal, rec);
  rho = std::move(s.rho);
  v = std::move(s.v);
  t = t_new;
}

RunRecord Simulation::run() {
  if (rho0_.empty()) throw ConfigError("simulation: built without initial data");
  RunRecord rec;
  std::vector<double> rho = rho0_;
  Eigen::VectorXd v = v0_;
  double t = 0.0;
  ledger_ = std::make_unique<MassLedger>(total_mass(mesh_, rho));
  tracker_ = std::make_unique<MaxPrincipleTracker>(rho, bd_, mesh_.has_inflow());
  rec.initial_energy = energy_state(basis_, cp_, mesh_, rho, v).total();
  rec.initial_congestion = congestion_diagnostics(mesh_, rho, divergence(v), cp_, cfg_.scheme.tau_c);
  rec.snapshots.push_back({0, 0.0, rho, v});

  const int steps = std::max(1, static_cast<int>(std::lround(cfg_.scheme.T / cfg_.scheme.dt)));
  const double dt = cfg_.scheme.T / steps;
  for (int k = 1; k <= steps; ++k) {
    advance(rho, v, t, dt, 0, k, rec);
    const bool snap = k == steps || (cfg_.scheme.snapshot_every > 0 && k % cfg_.scheme.snapshot_every == 0);
    if (snap) rec.snapshots.push_back({k, t, rho, v});
  }
  rec.congested_divergence_L2t = std::sqrt(rec.congested_divergence_L2t);
  rec.energy_verdict = assert_energy_inequality(rec.energy, rec.initial_energy, cfg_.scheme.energy_tol);
  rec.final_congestion = congestion_diagnostics(mesh_, rho, divergence(v), cp_, cfg_.scheme.tau_c);
  rec.sup_rho = tracker_->sup_rho();
  rec.inf_rho = tracker_->inf_rho();
  rec.bound = tracker_->bound();
  return rec;
}

}  // namespace congesta
