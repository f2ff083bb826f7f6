#pragma once

#include <array>
#include <string>
#include <vector>

#include "congesta/simulation.hpp"

namespace congesta {

/// Block-averaged Reynolds defect of one state. Per block B:
///   R_B = avg(rho u (x) u) - avg(rho u) (x) avg(rho u) / avg(rho),   E_B = tr R_B / 2.
struct DefectEstimate {
  int block = 0;            // cells per block side
  int blocks_per_axis = 0;
  std::vector<double> reynolds_trace;
  std::vector<double> kinetic_defect;
  std::vector<std::array<double, 4>> reynolds;  // R_B[a*2+b]
  double max_trace = 0.0;
  double min_trace = 0.0;         // before clamping
  double integral_trace = 0.0;    // int tr R
  double integral_kinetic = 0.0;  // int E
  bool ratio_bounds_ok = true;    // d_lower E <= tr R <= d_upper E where E > 1e-10
  int clamped = 0;                // blocks with tiny negative traces set to zero
};

/// Estimator on raw point samples: weights and cells from `pts`, rho_pts[q], u_pts[q*dim+a].
/// Throws ConfigError for blocks under 4 cells or not dividing the grid, NegativeDefect
/// for a trace below -1e-8.
DefectEstimate estimate_defect(const Mesh& mesh, const std::vector<QuadPoint>& pts, const std::vector<double>& rho_pts,
                               const std::vector<double>& u_pts, int block, double d_lower, double d_upper);

/// Estimator for a stored state u = v.w + uB.
DefectEstimate estimate_defect(const Simulation& sim, const std::vector<double>& rho, const Eigen::VectorXd& v);

/// Space-time test functions (t/T)^m psi(x). Scalar ones (psi a cosine product) test the
/// continuity clause. Vector ones psi e_a test the momentum clause: psi is a sine product
/// times a cutoff vanishing on the outer cell layer and ramping up over the next one.
struct TestFunction {
  int power = 0;
  int kx = 0, ky = 0;
  int component = 0;  // vector tests only
  double inset = 0.0;  // vector tests: width of the layer where the cutoff vanishes
  double value(int dim, bool vector, const Vec2& x) const;
  Vec2 grad(int dim, bool vector, const Vec2& x) const;
};

struct TestBank {
  std::string version;
  int dim = 1;
  std::vector<TestFunction> scalar;
  std::vector<TestFunction> vector;
};

/// The fixed bank: 4 time powers times 5 spatial shapes per clause. `inset` is the
/// width of the excluded boundary layer (one cell).
TestBank make_test_bank(int dim, double inset);

struct DissipativeVerdict {
  std::string bank_version;
  int bank_size = 0;
  double continuity_residual = 0.0;  // max over the bank
  int continuity_worst = -1;
  double momentum_residual = 0.0;    // max over the bank, defect term included
  int momentum_worst = -1;
  double energy_margin = 0.0;        // RHS - LHS of the energy clause, cumulative
  double complementarity = 0.0;      // int int |(rho - 1) pi|
  double congested_divergence = 0.0; // L2 over (0,T) x congested set
  double defect_final_trace = 0.0;   // int tr R at T
  double sup_ratio = 0.0, inf_rho = 0.0;  // sup rho/rho*, inf rho over the snapshots
  bool continuity_pass = false;
  bool momentum_pass = false;
  bool energy_pass = false;
  bool complementarity_pass = false;
  bool congested_divergence_pass = false;
  bool bounds_ok = false;  // 0 <= rho <= rho* (1 + tau_c)
  bool pass() const { return continuity_pass && momentum_pass && energy_pass && bounds_ok; }
};

/// Weak residuals of the limit system evaluated on stored snapshots and energy rows.
/// Time derivatives of the test functions are taken as exact increments between
/// snapshots, so the time part telescopes; the spatial terms use the right endpoint.
DissipativeVerdict dissipative_verdict(const Simulation& sim, const RunRecord& rec, const TestBank& bank);

/// One time slice for the equivalence check.
struct LemmaSlice {
  double dt = 0.0;
  std::vector<double> rho;
  std::vector<double> div;
};

struct LemmaVerdict {
  double congested_divergence = 0.0;  // L2 over (0,T) x {rho > rho* (1 - tau_c)}
  double rho0_min = 0.0, rho0_max = 0.0;  // as a fraction of rho*
  double rho_min = 0.0, rho_max = 0.0;
  double div_tol = 0.0, rho_tol = 0.0;
  bool i_holds = false;   // 0 < rho0 <= rho*, div u = 0 on the congested set
  bool ii_holds = false;  // 0 < rho <= rho* over the run
  bool i_implies_ii = false;
  bool ii_implies_i = false;
  bool consistent() const { return i_holds == ii_holds; }
};

LemmaVerdict lemma_equivalence_check(const Mesh& mesh, const std::vector<double>& rho0,
                                     const std::vector<LemmaSlice>& slices, const CongestionPressure& cp,
                                     double tau_c, double div_tol);
LemmaVerdict lemma_equivalence_check(const Simulation& sim, const RunRecord& rec);

struct CompatibilityVerdict {
  std::string status;  // classical-compatible | not-in-compatibility-regime | incompatible
  bool smooth = false;
  bool defect_ok = false, gap_ok = false, pairing_ok = false, energy_ok = false;
  double defect_max = 0.0;   // max block trace over all snapshots
  double gap_max = 0.0;      // max pointwise Fenchel-Young gap over all steps
  double pairing_max = 0.0;  // max |int pi div u| over the congested set
  double overshoot_max = 0.0;
};

/// Classical compatibility of a run: no defect, S in dF(Du) pointwise, pi div u = 0.
/// Runs that are not smooth (overshoot or defect above threshold) are out of regime.
CompatibilityVerdict compatibility_check(const Simulation& sim, const RunRecord& rec,
                                         const DissipativeVerdict& verdict);

/// Every limit verdict for one run.
struct LimitsReport {
  DefectEstimate defect;    // at the final snapshot
  double min_defect = 0.0;  // smallest block trace over all snapshots, before clamping
  double max_defect = 0.0;
  DissipativeVerdict dissipative;
  LemmaVerdict lemma;
  CompatibilityVerdict compatibility;
};

LimitsReport evaluate_limits(const Simulation& sim, const RunRecord& rec);

struct SweepPoint {
  double alpha = 0.0, delta = 0.0, eps = 0.0, dt = 0.0;
  int n = 0, resolution = 0;
  bool ok = false;
  std::string error;
  int exit_kind = 0;  // 0 ok, else the exit code of the failure
  double terminal_kinetic = 0.0;
  double terminal_v_norm = 0.0;
  Eigen::VectorXd terminal_v;
  double energy_margin = 0.0;   // -max per-step residual
  double max_energy_residual = 0.0;
  double overshoot_L2_max = 0.0;
  double complementarity_integral = 0.0;
  double congested_divergence_L2t = 0.0;
  double max_closure = 0.0;
  double mass_drift = 0.0;
  double sup_rho = 0.0;
  int steps = 0;
  int max_iterations = 0;
};

struct RateFit {
  std::string axis;
  std::string quantity;
  int points = 0;
  double slope = 0.0;  // NaN when fewer than two usable points
  double intercept = 0.0;
  double r2 = 0.0;
  std::vector<double> x, y;
};

struct SweepReport {
  std::vector<SweepPoint> points;
  std::vector<RateFit> fits;
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  int workers = 1;
};

/// Cartesian product of the sweep axes over `base`, in row-major axis order.
std::vector<RunConfig> sweep_grid(const RunConfig& base);

/// Runs every grid point on `workers` threads. Failures are recorded per point.
/// Rates are fitted along each axis with the other axes held at their first value.
SweepReport run_sweep(const RunConfig& base, int workers);

/// Least squares fit of log y against log x over the positive finite pairs.
RateFit fit_loglog(const std::string& axis, const std::string& quantity, const std::vector<double>& x,
                   const std::vector<double>& y);

}  // namespace congesta
