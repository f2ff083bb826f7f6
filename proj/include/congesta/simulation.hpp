#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "congesta/config.hpp"
#include "congesta/congestion.hpp"
#include "congesta/continuity.hpp"
#include "congesta/energy.hpp"
#include "congesta/galerkin.hpp"
#include "congesta/momentum.hpp"

namespace congesta {

struct ContinuityRow {
  int step = 0;
  double t = 0.0, dt = 0.0;
  double mass = 0.0;
  double inflow = 0.0, outflow = 0.0, diffusive = 0.0;  // this step, times dt
  double closure = 0.0;                                 // per-step mass ledger residual
  double drift = 0.0;                                   // cumulative ledger drift
  double sup_rho = 0.0, inf_rho = 0.0;
  double bound = 0.0, formula_bound = 0.0;
  double renorm_entropy = 0.0;  // renormalized residual for z log z
};

struct MomentumRow {
  int step = 0;
  double t = 0.0, dt = 0.0;
  int iterations = 0;
  int halvings = 0;
  double kinetic = 0.0;
  double v_norm = 0.0;
  double max_div = 0.0;  // sup |div_h u|
  double overshoot_L2 = 0.0;
  double complementarity = 0.0;
  double congested_divergence = 0.0;
  double overshoot_L1 = 0.0, overshoot_L4 = 0.0;
  double pressure_mass = 0.0;
  double congested_pairing = 0.0;
};

struct Snapshot {
  int step = 0;
  double t = 0.0;
  std::vector<double> rho;
  Eigen::VectorXd v;
};

struct RunRecord {
  std::vector<ContinuityRow> continuity;
  std::vector<MomentumRow> momentum;
  std::vector<EnergyLedger> energy;
  std::vector<Snapshot> snapshots;
  double initial_energy = 0.0;
  EnergyVerdict energy_verdict;
  CongestionReport initial_congestion, final_congestion;
  double complementarity_integral = 0.0;  // time integral of int pi |1 - rho/rho*|
  double overshoot_L2_max = 0.0;
  double congested_divergence_L2t = 0.0;  // L2 over (0,T) x {rho > rho* (1 - tau_c)}
  double max_closure = 0.0;
  double sup_rho = 0.0, inf_rho = 0.0, bound = 0.0;
  int steps = 0;
  int max_iterations = 0;
  int halvings = 0;
};

/// Everything one run needs, built from a config. Objects reference each other, so
/// the context is neither copied nor moved.
class Simulation {
 public:
  /// with_initial = false skips building rho0 / v0 (verdicts on stored fields need only
  /// the discretization).
  explicit Simulation(const RunConfig& cfg, ExecPolicy policy = ExecPolicy::kParallel, bool with_initial = true);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  const RunConfig& config() const { return cfg_; }
  const Mesh& mesh() const { return mesh_; }
  const BoundaryData& boundary() const { return bd_; }
  const GalerkinBasis& basis() const { return basis_; }
  const MollifiedPotential& potential() const { return pot_; }
  const CongestionPressure& pressure() const { return cp_; }
  MomentumSolver& momentum() { return mom_; }
  const MomentumSolver& momentum() const { return mom_; }

  /// Scales the stress fed to the energy ledger. Only for negative controls.
  void set_ledger_stress_scale(double s) { ledger_stress_scale_ = s; }

  /// Initial density and Galerkin coefficients of u0 - uB.
  const std::vector<double>& rho0() const { return rho0_; }
  const Eigen::VectorXd& v0() const { return v0_; }

  /// Runs to T. Hard assertions (max principle, mass ledger, Fenchel-Young floor)
  /// throw; solver failures are retried with halved dt up to max_halvings times.
  RunRecord run();

  /// Cellwise divergence of u = v.w + uB.
  std::vector<double> divergence(const Eigen::VectorXd& v) const;

 private:
  void advance(std::vector<double>& rho, Eigen::VectorXd& v, double& t, double dt, int depth, int nominal,
               RunRecord& rec);
  void commit(const std::vector<double>& rho_old, const Eigen::VectorXd& v_old, const CoupledStep& s, double t,
              double dt, int depth, int nominal, RunRecord& rec);

  RunConfig cfg_;
  ExecPolicy policy_;
  Mesh mesh_;
  BoundaryData bd_;
  GalerkinBasis basis_;
  MollifiedPotential pot_;
  CongestionPressure cp_;
  ContinuitySolver cont_;
  MomentumSolver mom_;
  std::vector<double> rho0_;
  Eigen::VectorXd v0_;
  std::unique_ptr<MassLedger> ledger_;
  std::unique_ptr<MaxPrincipleTracker> tracker_;
  double ledger_stress_scale_ = 1.0;
};

/// Builds the congestion pressure for a config (cellwise threshold from file if given).
CongestionPressure make_pressure(const RunConfig& cfg, const Mesh& mesh);

}  // namespace congesta
