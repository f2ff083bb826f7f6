#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "congesta/domain.hpp"

namespace congesta {

/// Velocity fluxes through every face: integral of u . n, n pointing from the
/// left to the right cell on interior faces and outward on boundary faces.
struct FaceFluxes {
  std::vector<double> interior;
  std::vector<double> boundary;
};

/// Boundary fluxes of one continuity step, already multiplied by dt.
struct StepFluxes {
  double outflow = 0.0;    // a >= 0 faces: a rho_cell
  double inflow = 0.0;     // a < 0 faces: |a| rho_cell
  double diffusive = 0.0;  // a < 0 faces: |a| (rhoB - rho_cell), the Robin correction
};

struct DensityField {
  std::vector<double> rho;
  double t = 0.0;
};

/// Face fluxes of a velocity field by 4-point Gauss quadrature along each face
/// (point evaluation in 1D).
FaceFluxes face_fluxes_from_field(const Mesh& mesh, const std::function<Vec2(const Vec2&)>& u);

/// Cellwise discrete divergence sum_f a_f / |c|.
std::vector<double> discrete_divergence(const Mesh& mesh, const FaceFluxes& a);

/// Implicit upwind finite-volume step of rho_t + div(rho u) = eps Lap rho with the
/// Robin inflow condition. The system matrix is an M-matrix by construction; this is
/// re-checked on every assembly.
class ContinuitySolver {
 public:
  ContinuitySolver(const Mesh& mesh, const BoundaryData& bd, double eps);
  ~ContinuitySolver();
  ContinuitySolver(ContinuitySolver&&) noexcept;
  ContinuitySolver& operator=(ContinuitySolver&&) noexcept;

  std::vector<double> step(const std::vector<double>& rho_old, const FaceFluxes& a, double dt,
                           StepFluxes* fluxes = nullptr);

  double eps() const { return eps_; }

 private:
  const Mesh* mesh_;
  const BoundaryData* bd_;
  double eps_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Interior mass and cumulative boundary exchanges.
class MassLedger {
 public:
  explicit MassLedger(double initial_mass) : initial_(initial_mass), mass_(initial_mass) {}
  /// Records one step and returns its closure residual
  /// (mass change + outflow - inflow - diffusive).
  double record(double new_mass, const StepFluxes& f);

  double initial_mass() const { return initial_; }
  double interior_mass() const { return mass_; }
  double inflow_cumulative() const { return inflow_; }
  double outflow_cumulative() const { return outflow_; }
  double diffusive_cumulative() const { return diffusive_; }
  /// mass(t) + outflow - inflow - diffusive - mass(0)
  double cumulative_drift() const { return mass_ + outflow_ - inflow_ - diffusive_ - initial_; }
  double max_step_residual() const { return max_step_; }

 private:
  double initial_, mass_;
  double inflow_ = 0.0, outflow_ = 0.0, diffusive_ = 0.0, max_step_ = 0.0;
};

double total_mass(const Mesh& mesh, const std::vector<double>& rho);

/// A renormalization function B with its derivatives.
struct Renormalization {
  std::function<double(double)> B, dB;
  static Renormalization identity();
  static Renormalization square();
  /// z log z with log guarded below by `floor`.
  static Renormalization entropy(double floor = 1e-300);
};

/// Discrete renormalized balance over one step.
struct RenormResidual {
  double change = 0.0;        // sum |c| [B(rho^{k+1}) - B(rho^k)]
  double transport = 0.0;     // -dt sum_c B'(rho_c) (convective + boundary outflux)_c
  double diffusion = 0.0;     // -dt eps sum_f A/h (B'_R - B'_L)(rho_R - rho_L), <= 0 for convex B
  double time_bregman = 0.0;  // sum |c| Bregman_B(rho^k; rho^{k+1}) >= 0 for convex B
  /// change - transport - diffusion. Equals -time_bregman up to roundoff; <= 0 for convex B.
  double residual = 0.0;
};

RenormResidual renormalized_residual(const Mesh& mesh, const BoundaryData& bd, double eps,
                                     const std::vector<double>& rho_old, const std::vector<double>& rho_new,
                                     const FaceFluxes& a, double dt, const Renormalization& B);

/// Tracks the maximum-principle bound over a run.
///   formula:  max{|rho0|_inf, rhoB, |uB|_inf} exp(t sup|div_h u|)
///   discrete: max{|rho0|_inf, rhoB} prod_k (1 - dt_k max(0, -min div_h u^k))^{-1}
/// The asserted bound is the larger of the two.
class MaxPrincipleTracker {
 public:
  MaxPrincipleTracker(const std::vector<double>& rho0, const BoundaryData& bd, bool has_inflow);
  void record(const std::vector<double>& rho, const std::vector<double>& div, double dt);
  double formula_bound() const;
  double discrete_bound() const { return discrete_; }
  double bound() const;
  double sup_rho() const { return sup_rho_; }
  double inf_rho() const { return inf_rho_; }
  double sup_div() const { return sup_div_; }
  double time() const { return t_; }
  /// Positivity floor c0 exp(-t sup|div|) with c0 = min(inf rho0, rhoB on inflow).
  double positivity_floor() const;
  /// Throws MaxPrincipleViolated.
  void check() const;

 private:
  double data_max_ = 0.0, data_min_ = 0.0, uB_sup_ = 0.0;
  double sup_div_ = 0.0, t_ = 0.0, discrete_ = 0.0;
  double sup_rho_ = 0.0, inf_rho_ = 0.0;
};

}  // namespace congesta
