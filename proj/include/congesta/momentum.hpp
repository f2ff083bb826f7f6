#pragma once

#include <Eigen/Dense>
#include <vector>

#include "congesta/congestion.hpp"
#include "congesta/continuity.hpp"
#include "congesta/galerkin.hpp"
#include "congesta/kernels.hpp"
#include "congesta/potential.hpp"

namespace congesta {

/// Galerkin coefficients v plus the boundary extension: u = sum_i v_i w_i + uB.
struct VelocityState {
  Eigen::VectorXd v;
  double t = 0.0;
};

/// Backward-Euler Galerkin momentum balance tested against every mode:
///   sum_i M_ij(rho^{k+1}) v_i^{k+1} + int rho^{k+1} uB . w_j - int rho^k u^k . w_j
///     = dt [ int rho u (x) u : grad w_j + int pi div w_j - int S(Du^{k+1}) : D w_j
///            - eps int (grad rho . grad) u . w_j ]
/// Convection and the eps term are evaluated at the current iterate; the viscous
/// term is linearized by one Newton step per call.
class MomentumSolver {
 public:
  MomentumSolver(const Mesh& mesh, const GalerkinBasis& basis, const BoundaryData& bd, const MollifiedPotential& pot,
                 const CongestionPressure& cp, double eps, ExecPolicy policy = ExecPolicy::kParallel);

  const GalerkinBasis& basis() const { return *basis_; }
  const MollifiedPotential& potential() const { return *pot_; }
  ExecPolicy policy() const { return policy_; }

  /// Face fluxes of u = v . w + uB (exact face integrals of the modes).
  FaceFluxes face_fluxes(const Eigen::VectorXd& v) const;

  /// Samples rho, u, grad u, grad rho, D and S = dF(D) at every quadrature point.
  /// rho_old / v_old feed the old-momentum term only.
  void sample(const std::vector<double>& rho_old, const Eigen::VectorXd& v_old, const std::vector<double>& rho_new,
              const Eigen::VectorXd& v, std::vector<PointState>& pts) const;

  /// Piecewise-constant density gradient reconstruction at a point: face differences
  /// interpolated linearly across the cell, Robin flux on inflow boundary faces.
  Vec2 grad_rho(const std::vector<double>& rho, const QuadPoint& p) const;

  /// sum_c pi_c (boundary integral of w_j . n over cell c).
  Eigen::VectorXd pressure_term(const std::vector<double>& rho) const;

  /// One Newton-linearized update from the iterate v_it.
  Eigen::VectorXd update(const std::vector<double>& rho_old, const Eigen::VectorXd& v_old,
                         const std::vector<double>& rho_new, const Eigen::VectorXd& v_it, double dt);

  const Assembly& last_assembly() const { return asm_; }

 private:
  const Mesh* mesh_;
  const GalerkinBasis* basis_;
  const BoundaryData* bd_;
  const MollifiedPotential* pot_;
  const CongestionPressure* cp_;
  double eps_;
  ExecPolicy policy_;
  std::vector<int> bface_[2][2];  // boundary face index per cell, [axis][side], -1 if interior
  std::vector<PointState> pts_;
  Assembly asm_;
};

struct CouplerOptions {
  double tol = 1e-10;
  int max_iter = 50;
  bool freeze_density = false;
};

struct CoupledStep {
  std::vector<double> rho;
  Eigen::VectorXd v;
  FaceFluxes fluxes;        // fluxes used by the final continuity solve
  StepFluxes mass_fluxes;   // boundary mass exchange of that solve
  int iterations = 0;
};

/// Picard iteration for one time step: continuity with the current velocity, then
/// momentum with the new density, until |v^{(k+1)} - v^{(k)}| <= tol (1 + |v^{(k)}|).
/// Throws FixedPointStall after max_iter iterations.
CoupledStep fixed_point_coupler(ContinuitySolver& cont, MomentumSolver& mom, const std::vector<double>& rho_prev,
                                const Eigen::VectorXd& v_prev, double dt, const CouplerOptions& opts);

}  // namespace congesta
