#pragma once

#include <Eigen/Dense>
#include <vector>

#include "congesta/galerkin.hpp"
#include "congesta/potential.hpp"

namespace congesta {

/// Fields sampled at one quadrature point.
struct PointState {
  double rho_old = 0.0, rho_new = 0.0;
  Vec2 u_old{0.0, 0.0};  // full velocity at the previous time level
  Vec2 u{0.0, 0.0};      // full velocity of the current iterate
  Vec2 uB{0.0, 0.0};
  double grad_u[4] = {0.0, 0.0, 0.0, 0.0};  // grad_u[a*2+b] = d u_a / d x_b
  Vec2 grad_rho{0.0, 0.0};
  SymTensor D, S;  // symmetric gradient of u and the stress dF(D)
};

/// Galerkin integrals against every test mode w_j.
struct Assembly {
  Eigen::VectorXd old_momentum;       // int rho_old u_old . w_j
  Eigen::VectorXd boundary_momentum;  // int rho_new uB . w_j
  Eigen::VectorXd convection;         // int rho_new u (x) u : grad w_j
  Eigen::VectorXd viscous;            // int S : D w_j
  Eigen::VectorXd eps_term;           // int (grad rho . grad) u . w_j   (without eps)
  Eigen::MatrixXd mass;               // int rho_new w_i . w_j
  Eigen::MatrixXd stiffness;          // int H(D)[D w_i] : D w_j
};

enum class ExecPolicy { kSerial, kParallel };

/// Assembles all mode integrals. The parallel path splits over test modes and is
/// deterministic; the serial path is a point-major reference implementation.
void assemble(const GalerkinBasis& basis, const std::vector<PointState>& pts, const MollifiedPotential& pot,
              bool with_stiffness, ExecPolicy policy, Assembly& out);

/// Number of OpenMP threads available to the parallel path (1 without OpenMP).
int kernel_threads();

}  // namespace congesta
