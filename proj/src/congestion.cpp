#include "congesta/congestion.hpp"

#include <cmath>
#include <string>

namespace congesta {

namespace {
constexpr double kVacuum = 1e-12;
}

CongestionPressure::CongestionPressure(double alpha, std::vector<double> rho_star)
    : alpha_(alpha), rho_star_(std::move(rho_star)) {
  if (!(alpha > 1.0)) throw AlphaTooSmall("congestion: alpha must be > 1, got " + std::to_string(alpha));
  for (double r : rho_star_)
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("congestion: threshold rho* must be positive and finite");
}

double CongestionPressure::ratio_pow(double rho, int cell, double power) const {
  if (rho < kVacuum) return 0.0;
  return std::exp(power * std::log(rho / threshold(cell)));
}

double CongestionPressure::pressure(double rho, int cell) const { return ratio_pow(rho, cell, alpha_); }

double CongestionPressure::potential(double rho, int cell) const { return pressure(rho, cell) / (alpha_ - 1.0); }

double CongestionPressure::potential_d1(double rho, int cell) const {
  return alpha_ / ((alpha_ - 1.0) * threshold(cell)) * ratio_pow(rho, cell, alpha_ - 1.0);
}

double CongestionPressure::potential_d2(double rho, int cell) const {
  const double s = threshold(cell);
  return alpha_ / (s * s) * ratio_pow(rho, cell, alpha_ - 2.0);
}

std::vector<double> CongestionPressure::pressure_field(const std::vector<double>& rho) const {
  std::vector<double> out(rho.size());
  for (std::size_t c = 0; c < rho.size(); ++c) out[c] = pressure(rho[c], static_cast<int>(c));
  return out;
}

std::vector<double> CongestionPressure::potential_field(const std::vector<double>& rho) const {
  std::vector<double> out(rho.size());
  for (std::size_t c = 0; c < rho.size(); ++c) out[c] = potential(rho[c], static_cast<int>(c));
  return out;
}

CongestionReport congestion_diagnostics(const Mesh& mesh, const std::vector<double>& rho,
                                        const std::vector<double>& div, const CongestionPressure& cp,
                                        double tau_c) {
  CongestionReport r;
  r.tau_c = tau_c;
  const double vol = mesh.cell_volume();
  double s1 = 0, s2 = 0, s4 = 0, d2 = 0;
  for (std::size_t c = 0; c < rho.size(); ++c) {
    const int ci = static_cast<int>(c);
    const double star = cp.threshold(ci);
    const double over = std::max(rho[c] - star, 0.0);
    s1 += over;
    s2 += over * over;
    s4 += over * over * over * over;
    const double p = cp.pressure(rho[c], ci);
    r.pressure_mass += vol * p;
    r.complementarity += vol * p * std::abs(1.0 - rho[c] / star);
    if (rho[c] > star * (1.0 - tau_c)) {
      d2 += div[c] * div[c];
      r.congested_measure += vol;
      r.congested_pairing += vol * p * div[c];
    }
  }
  r.overshoot_L1 = vol * s1;
  r.overshoot_L2 = std::sqrt(vol * s2);
  r.overshoot_L4 = std::pow(vol * s4, 0.25);
  r.congested_divergence = std::sqrt(vol * d2);
  const double a = cp.alpha();
  r.theta = (0.5 - 1.0 / a) / (1.0 - 1.0 / a);
  return r;
}

}  // namespace congesta
