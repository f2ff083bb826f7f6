#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "congesta/congestion.hpp"
#include "congesta/continuity.hpp"
#include "congesta/kernels.hpp"
#include "congesta/momentum.hpp"

namespace congesta {

/// One backward-Euler step of the approximate energy balance
///   [ int 1/2 rho |u - uB|^2 + Pi(rho) ]  +  dt [ int S:Du + out + in_bregman + eps_entropy + eps_coupling ]
///     <=  dt [ rhs_convective + rhs_pressure + rhs_transport + rhs_stress + rhs_inflow ].
/// Rate terms are evaluated at the new time level. Step quantities (num_*) are the
/// dissipation introduced by the scheme itself; they are reported, not credited.
struct EnergyLedger {
  double t = 0.0;
  double dt = 0.0;

  double kinetic = 0.0;             // int 1/2 rho |u - uB|^2
  double pressure_potential = 0.0;  // int Pi(rho)
  double energy = 0.0;              // kinetic + pressure_potential
  double energy_change = 0.0;       // energy - energy at the previous level

  double dissipation_primal = 0.0;   // int F(Du)
  double dissipation_dual = 0.0;     // int F*(S)
  double dissipation_pairing = 0.0;  // int S:Du
  double boundary_out = 0.0;         // int_out Pi(rho) uB.n
  double boundary_in_bregman = 0.0;  // int_in [Pi(rhoB) - Pi'(rho)(rhoB - rho) - Pi(rho)] |uB.n|
  double eps_entropy = 0.0;          // eps int Pi''(rho) |grad rho|^2, face-difference form
  double eps_coupling = 0.0;         // -eps int (grad rho . grad) v . uB

  double rhs_convective = 0.0;  // -int rho u (x) u : grad uB
  double rhs_pressure = 0.0;    // -int pi div uB
  double rhs_transport = 0.0;   // int rho ((u . grad) uB) . uB
  double rhs_stress = 0.0;      // int S : grad uB
  double rhs_inflow = 0.0;      // -int_in Pi(rhoB) uB.n

  double num_kinetic = 0.0;    // 1/2 int rho_old |v_new - v_old|^2
  double num_potential = 0.0;  // sum |c| Bregman_Pi(rho_old; rho_new)
  double num_upwind = 0.0;     // dt sum_f |a_f| Bregman_Pi(rho_up; rho_down)

  double min_point_gap = 0.0;  // min over points of F(D) + F*(S) - S:D
  double max_point_gap = 0.0;

  double residual = 0.0;       // pairing form
  double residual_dual = 0.0;  // F + F* form

  double lhs_rate() const;  // dissipation (pairing form) + boundary + eps terms
  double rhs_rate() const;
};

/// Kinetic and potential energy of one state.
struct EnergyState {
  double kinetic = 0.0;
  double pressure_potential = 0.0;
  double total() const { return kinetic + pressure_potential; }
};

EnergyState energy_state(const GalerkinBasis& basis, const CongestionPressure& cp, const Mesh& mesh,
                         const std::vector<double>& rho, const Eigen::VectorXd& v);

/// Fields of one accepted step. `pts` are sampled at (rho_new, v_new) and carry the stress
/// actually used by the momentum step; `fluxes` are the face fluxes of the continuity solve.
struct StepFields {
  const std::vector<double>* rho_old = nullptr;
  const std::vector<double>* rho_new = nullptr;
  const Eigen::VectorXd* v_old = nullptr;
  const Eigen::VectorXd* v_new = nullptr;
  const std::vector<PointState>* pts = nullptr;
  const FaceFluxes* fluxes = nullptr;
  double dt = 0.0;
  double t = 0.0;
};

EnergyLedger assemble_ledger(const Mesh& mesh, const GalerkinBasis& basis, const BoundaryData& bd,
                             const MollifiedPotential& pot, const CongestionPressure& cp, double eps,
                             const StepFields& step, ExecPolicy policy = ExecPolicy::kParallel);

/// Recomputes residual and residual_dual from the stored columns (dt included).
void recompute_residuals(EnergyLedger& L);

struct EnergyVerdict {
  bool pass = true;
  double tol = 0.0;
  double initial_energy = 0.0;
  double max_residual = 0.0;       // max over steps of the F + F* form
  double max_residual_pairing = 0.0;
  double margin = 0.0;             // -max_residual; 0 exactly on zero data
  int worst_step = -1;
  double min_point_gap = 0.0;
  std::string form = "dual-sum";
};

/// Per-step check residual_dual <= tol (1 + E(0)). Non-fatal.
EnergyVerdict assert_energy_inequality(const std::vector<EnergyLedger>& rows, double initial_energy, double tol);

/// Fenchel-Young floor over the stored rows; throws FenchelYoungViolated below -floor.
void check_fenchel_floor(const std::vector<EnergyLedger>& rows, double floor = 1e-8);

}  // namespace congesta
