#include "congesta/potential.hpp"

#include <cmath>
#include <limits>

#include "congesta/quadrature.hpp"

namespace congesta {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBracketLimit = 1e12;

double sign(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

}  // namespace

void PotentialSpec::validate(int dim) const {
  if (!(q > 1.0)) throw ConfigError("potential: q must be > 1");
  if (!(mu0 > 0.0)) throw ConfigError("potential: mu0 must be > 0");
  if (mu1 < 0.0 || eta0 < 0.0 || eta1 < 0.0) throw ConfigError("potential: mu1, eta0, eta1 must be >= 0");
  if (dim == 1 && !(eta0 > 0.0))
    throw ConfigError("potential: eta0 must be > 0 in one dimension (the deviatoric part vanishes)");
}

double PotentialSpec::growth_constant() const { return mu0 / (q * std::pow(2.0, 0.5 * q)); }

// ---------------------------------------------------------------------------
// RadialProfile

RadialProfile::RadialProfile(double c, double b, double q, double delta)
    : c_(c), b_(b), q_(q), delta_(delta) {
  if (delta_ < 0.0) throw ConfigError("mollification radius must be >= 0");
  offset_ = delta_ > 0.0 ? window_mean(0.0) : raw(0.0);
}

double RadialProfile::raw(double y) const {
  if (c_ == 0.0) return 0.0;
  return c_ * std::pow(b_ + y * y, 0.5 * q_);
}

double RadialProfile::raw_d1(double y) const {
  if (c_ == 0.0 || y == 0.0) return 0.0;
  return c_ * q_ * y * std::pow(b_ + y * y, 0.5 * q_ - 1.0);
}

double RadialProfile::raw_d2(double y) const {
  if (c_ == 0.0) return 0.0;
  const double s = b_ + y * y;
  if (s == 0.0) return q_ < 2.0 ? kInf : (q_ == 2.0 ? c_ * q_ : 0.0);
  return c_ * q_ * std::pow(s, 0.5 * q_ - 2.0) * (b_ + (q_ - 1.0) * y * y);
}

double RadialProfile::antiderivative(double y) const {
  if (c_ == 0.0 || y == 0.0) return 0.0;
  const double ay = std::abs(y);
  if (b_ == 0.0) return sign(y) * c_ * std::pow(ay, q_ + 1.0) / (q_ + 1.0);
  // y = sqrt(b) sinh(theta): the integrand c (sqrt(b) cosh theta)^(q+1) is smooth on unit panels.
  const double sb = std::sqrt(b_);
  const double theta = std::asinh(ay / sb);
  const int panels = std::max(1, static_cast<int>(std::ceil(theta)));
  const double qq = q_ + 1.0;
  const double val = integrate([&](double th) { return std::pow(sb * std::cosh(th), qq); }, 0.0, theta, panels, 10);
  return sign(y) * c_ * val;
}

double RadialProfile::window_mean(double t) const {
  const double a = t - delta_, b = t + delta_;
  double window;
  if (b_ > 0.0 && delta_ <= 4.0 * std::sqrt(b_)) {
    // Short window relative to the analyticity radius: integrate g directly.
    const int panels = std::max(1, static_cast<int>(std::ceil(delta_ / std::sqrt(b_))));
    window = integrate([&](double y) { return raw(y); }, a, b, panels, 10);
  } else {
    window = antiderivative(b) - antiderivative(a);
  }
  return window / (2.0 * delta_);
}

double RadialProfile::value(double t) const {
  if (c_ == 0.0) return 0.0;
  if (delta_ == 0.0) return raw(t) - offset_;
  return window_mean(t) - offset_;
}

double RadialProfile::d1(double t) const {
  if (delta_ == 0.0) return raw_d1(t);
  return (raw(t + delta_) - raw(t - delta_)) / (2.0 * delta_);
}

double RadialProfile::d2(double t) const {
  if (delta_ == 0.0) return raw_d2(t);
  return (raw_d1(t + delta_) - raw_d1(t - delta_)) / (2.0 * delta_);
}

bool RadialProfile::singular_at(double t) const {
  return c_ != 0.0 && delta_ == 0.0 && b_ == 0.0 && q_ < 2.0 && t == 0.0;
}

double RadialProfile::conjugate_argmax(double s) const {
  s = std::abs(s);
  if (s == 0.0) return 0.0;
  if (c_ == 0.0) return kInf;
  double lo = 0.0, hi = 1.0;
  while (d1(hi) < s) {
    lo = hi;
    hi *= 2.0;
    if (hi > kBracketLimit) throw ConjugateOverflow("conjugate: stress magnitude beyond the supported range");
  }
  // Newton on d1(t) = s, falling back to bisection whenever the step leaves the bracket.
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double r = d1(t) - s;
    if (r == 0.0) return t;
    if (r < 0.0) lo = t;
    else hi = t;
    const double slope = d2(t);
    double next = (slope > 0.0 && std::isfinite(slope)) ? t - r / slope : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * std::abs(t)) return next;
    t = next;
  }
  return t;
}

double RadialProfile::conjugate(double s) const {
  s = std::abs(s);
  if (s == 0.0) return 0.0;
  if (c_ == 0.0) return kInf;
  const double t = conjugate_argmax(s);
  return s * t - value(t);
}

// ---------------------------------------------------------------------------
// MollifiedPotential

MollifiedPotential::MollifiedPotential(const PotentialSpec& spec, double delta)
    : spec_(spec),
      delta_(delta),
      dev_(spec.mu0 / spec.q, spec.mu1, spec.q, delta),
      tr_(spec.eta0, spec.eta1, spec.q, delta) {}

double MollifiedPotential::eval(const SymTensor& D) const {
  auto [D0, tau] = deviatoric_split(D);
  return dev_.value(D0.norm()) + tr_.value(tau);
}

Subgradient MollifiedPotential::subgradient(const SymTensor& D) const {
  auto [D0, tau] = deviatoric_split(D);
  const double r = D0.norm();
  Subgradient out{SymTensor(D.dim()), false};
  if (r > 0.0) out.stress = (dev_.d1(r) / r) * D0;
  else if (D.dim() > 1) out.singular = dev_.singular_at(0.0);
  const double p = tr_.d1(tau);
  for (int i = 0; i < D.dim(); ++i) out.stress(i, i) += p;
  out.singular = out.singular || tr_.singular_at(tau);
  return out;
}

SymTensor TangentMap::apply(const SymTensor& E) const {
  auto [E0, etau] = deviatoric_split(E);
  SymTensor out(dim);
  if (has_dev) {
    if (isotropic) {
      out = transverse * E0;
    } else {
      const double ne = contract(n, E0);
      out = transverse * (E0 - ne * n) + (normal * ne) * n;
    }
  }
  const double c = trace * etau;
  for (int i = 0; i < dim; ++i) out(i, i) += c;
  return out;
}

TangentMap MollifiedPotential::tangent_at(const SymTensor& D) const {
  TangentMap T;
  T.dim = D.dim();
  auto [D0, tau] = deviatoric_split(D);
  if (T.dim > 1 && !dev_.is_zero()) {
    T.has_dev = true;
    const double r = D0.norm();
    if (r == 0.0) {
      if (dev_.singular_at(0.0)) throw NonSmoothPoint("tangent: deviatoric profile has unbounded curvature at 0");
      T.isotropic = true;
      T.transverse = dev_.d2(0.0);
    } else {
      T.n = (1.0 / r) * D0;
      T.transverse = dev_.d1(r) / r;
      T.normal = dev_.d2(r);
    }
  }
  if (!tr_.is_zero()) {
    if (tr_.singular_at(tau)) throw NonSmoothPoint("tangent: trace profile has unbounded curvature at 0");
    T.trace = tr_.d2(tau);
  }
  return T;
}

SymTensor MollifiedPotential::tangent(const SymTensor& D, const SymTensor& E) const {
  return tangent_at(D).apply(E);
}

double MollifiedPotential::conjugate(const SymTensor& S) const {
  auto [S0, tau] = deviatoric_split(S);
  const double r = S.dim() > 1 ? S0.norm() : 0.0;
  return dev_.conjugate(r) + tr_.conjugate(tau / S.dim());
}

DualPair MollifiedPotential::fenchel_gap(const SymTensor& D, const SymTensor& S) const {
  DualPair out;
  out.F_value = eval(D);
  out.Fstar_value = conjugate(S);
  out.stress = S;
  out.gap = out.F_value + out.Fstar_value - contract(S, D);
  return out;
}

double MollifiedPotential::growth_floor(const SymTensor& D) const {
  return spec_.growth_constant() * std::pow(deviatoric(D).norm(), spec_.q);
}

}  // namespace congesta
