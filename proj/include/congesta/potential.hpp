#pragma once

#include "congesta/sym_tensor.hpp"

namespace congesta {

/// Coefficients of the isotropic viscosity potential
///   F(D) = mu0/q (mu1 + |D0|^2)^(q/2) + eta0 (eta1 + |tr D|^2)^(q/2).
struct PotentialSpec {
  double mu0 = 1.0;
  double mu1 = 0.0;
  double eta0 = 0.0;
  double eta1 = 0.0;
  double q = 2.0;

  /// Throws ConfigError when the coefficients are out of range for a run in `dim` dimensions.
  void validate(int dim) const;
  /// Growth constant mu of F(D) >= mu |D0|^q for |D| > 1.
  double growth_constant() const;
};

/// Even convex scalar profile t -> c (b + t^2)^(q/2) - c b^(q/2), optionally
/// averaged over [t - delta, t + delta] (box mollifier). The mollified profile
/// is renormalized to vanish at 0 and is C^2 for delta > 0.
class RadialProfile {
 public:
  RadialProfile() = default;
  RadialProfile(double c, double b, double q, double delta);

  double value(double t) const;
  double d1(double t) const;
  /// Second derivative. Infinite at t = 0 when the unmollified profile is a pure power q < 2.
  double d2(double t) const;
  /// True when d2 is unbounded at t.
  bool singular_at(double t) const;
  /// Legendre transform sup_t (s t - value(t)); +inf for the zero profile at s != 0.
  double conjugate(double s) const;
  /// The maximizing t of the Legendre transform (so d1(t) == |s|).
  double conjugate_argmax(double s) const;

  bool is_zero() const { return c_ == 0.0; }
  double delta() const { return delta_; }

 private:
  double raw(double y) const;     // g(|y|)
  double raw_d1(double y) const;  // odd
  double raw_d2(double y) const;  // even
  double antiderivative(double y) const;  // odd, G' = g
  double window_mean(double t) const;     // average of g over [t - delta, t + delta]

  double c_ = 0.0, b_ = 0.0, q_ = 2.0, delta_ = 0.0;
  double offset_ = 0.0;  // mollified value at 0
};

/// Result of a primal/dual evaluation at one (D, S) pair.
struct DualPair {
  double F_value = 0.0;
  double Fstar_value = 0.0;
  SymTensor stress;
  double gap = 0.0;  // F + F* - S:D
};

struct Subgradient {
  SymTensor stress;
  bool singular = false;  // Hessian unbounded here; minimal-norm selection returned
};

/// Hessian of F_delta frozen at one D; apply() is cheap, so assembly loops over
/// many directions reuse one evaluation of the profile derivatives.
struct TangentMap {
  int dim = 1;
  bool has_dev = false;
  bool isotropic = false;  // D0 = 0: the deviatoric part is a multiple of E0
  SymTensor n;             // unit deviatoric direction
  double transverse = 0.0;  // d1(r)/r, or d2(0) when isotropic
  double normal = 0.0;      // d2(r)
  double trace = 0.0;       // trace profile d2(tr D / d)
  SymTensor apply(const SymTensor& E) const;
};

/// F_delta split into a deviatoric and a trace profile. Immutable once built.
class MollifiedPotential {
 public:
  MollifiedPotential() = default;
  MollifiedPotential(const PotentialSpec& spec, double delta);

  const PotentialSpec& spec() const { return spec_; }
  double delta() const { return delta_; }
  const RadialProfile& deviatoric_profile() const { return dev_; }
  const RadialProfile& trace_profile() const { return tr_; }

  double eval(const SymTensor& D) const;
  Subgradient subgradient(const SymTensor& D) const;
  /// Second derivative of F_delta at D applied to the direction E.
  /// Throws NonSmoothPoint where the Hessian is unbounded.
  SymTensor tangent(const SymTensor& D, const SymTensor& E) const;
  TangentMap tangent_at(const SymTensor& D) const;
  /// F*(S) = phi*(|S0|) + psi*(tr S / d).
  double conjugate(const SymTensor& S) const;
  DualPair fenchel_gap(const SymTensor& D, const SymTensor& S) const;
  /// mu |D0|^q with the configured growth constant.
  double growth_floor(const SymTensor& D) const;

 private:
  PotentialSpec spec_;
  double delta_ = 0.0;
  RadialProfile dev_;
  RadialProfile tr_;
};

}  // namespace congesta
