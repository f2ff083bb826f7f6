#pragma once

#include <vector>

#include "congesta/domain.hpp"

namespace congesta {

/// Stiff isentropic pressure pi(rho) = (rho / rho*)^alpha with potential
/// Pi(rho) = pi(rho) / (alpha - 1).
class CongestionPressure {
 public:
  /// rho_star empty means the homogeneous threshold rho* = 1. Throws AlphaTooSmall for alpha <= 1.
  explicit CongestionPressure(double alpha, std::vector<double> rho_star = {});

  double alpha() const { return alpha_; }
  double threshold(int cell) const { return rho_star_.empty() ? 1.0 : rho_star_[cell]; }
  bool homogeneous() const { return rho_star_.empty(); }

  double pressure(double rho, int cell = 0) const;
  double potential(double rho, int cell = 0) const;
  double potential_d1(double rho, int cell = 0) const;
  double potential_d2(double rho, int cell = 0) const;

  std::vector<double> pressure_field(const std::vector<double>& rho) const;
  std::vector<double> potential_field(const std::vector<double>& rho) const;

 private:
  double ratio_pow(double rho, int cell, double power) const;  // (rho/rho*)^power, 0 near vacuum
  double alpha_;
  std::vector<double> rho_star_;
};

struct CongestionReport {
  double overshoot_L1 = 0.0;
  double overshoot_L2 = 0.0;
  double overshoot_L4 = 0.0;
  double complementarity = 0.0;       // integral of pi |1 - rho/rho*|
  double congested_divergence = 0.0;  // L2 norm of div u over {rho > rho* (1 - tau_c)}
  double congested_measure = 0.0;     // measure of that set
  double pressure_mass = 0.0;         // integral of pi
  double congested_pairing = 0.0;     // integral of pi div u over the congested set
  double theta = 0.0;                 // interpolation exponent (1/2 - 1/alpha) / (1 - 1/alpha)
  double tau_c = 0.0;
};

/// Diagnostics on one time slice. `div` is the cellwise velocity divergence.
CongestionReport congestion_diagnostics(const Mesh& mesh, const std::vector<double>& rho,
                                        const std::vector<double>& div, const CongestionPressure& cp,
                                        double tau_c);

}  // namespace congesta
