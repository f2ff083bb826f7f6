#pragma once

#include <vector>

namespace congesta {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule, nodes ascending. Exact for polynomials of degree 2n-1.
GaussRule gauss_legendre(int n);

/// Cached rule; n in [1, 32].
const GaussRule& gauss_legendre_cached(int n);

/// Composite Gauss-Legendre integral of f over [a, b] with `panels` equal panels.
template <class F>
double integrate(F&& f, double a, double b, int panels = 1, int points = 10) {
  const GaussRule& r = gauss_legendre_cached(points);
  const double w = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * w;
    double s = 0.0;
    for (std::size_t k = 0; k < r.nodes.size(); ++k) s += r.weights[k] * f(mid + 0.5 * w * r.nodes[k]);
    sum += 0.5 * w * s;
  }
  return sum;
}

}  // namespace congesta
