#include "congesta/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "congesta/quadrature.hpp"

namespace congesta {

namespace {
constexpr double kPi = std::numbers::pi;

// Integral of sin(k pi s) over [a, b].
double sin_integral(int k, double a, double b) { return (std::cos(k * kPi * a) - std::cos(k * kPi * b)) / (k * kPi); }
}  // namespace

GalerkinBasis::GalerkinBasis(const Mesh& mesh, int n_modes, int points_per_axis)
    : dim_(mesh.dim()), n_(n_modes), ppc_(dim_ == 1 ? points_per_axis : points_per_axis * points_per_axis) {
  if (n_modes < 1) throw ConfigError("galerkin: need at least one mode");
  if (points_per_axis < 1) throw ConfigError("galerkin: need at least one quadrature point per axis");

  if (dim_ == 1) {
    for (int k = 1; k <= n_; ++k) modes_.push_back({k, 0, 0, std::sqrt(2.0)});
  } else {
    const int K = static_cast<int>(std::ceil(std::sqrt(double(n_)))) + 2;
    std::vector<std::tuple<int, int, int>> pairs;
    for (int k = 1; k <= K; ++k)
      for (int l = 1; l <= K; ++l) pairs.emplace_back(k * k + l * l, k, l);
    std::sort(pairs.begin(), pairs.end());
    for (const auto& [key, k, l] : pairs) {
      for (int a = 0; a < 2 && static_cast<int>(modes_.size()) < n_; ++a) modes_.push_back({k, l, a, 2.0});
      if (static_cast<int>(modes_.size()) == n_) break;
    }
  }

  const GaussRule& g = gauss_legendre_cached(points_per_axis);
  const double h = mesh.h(), vol = mesh.cell_volume();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Vec2 xc = mesh.center(c);
    if (dim_ == 1) {
      for (int p = 0; p < points_per_axis; ++p)
        points_.push_back({{xc[0] + 0.5 * h * g.nodes[p], 0.0}, 0.5 * g.weights[p] * vol, c});
    } else {
      for (int py = 0; py < points_per_axis; ++py)
        for (int px = 0; px < points_per_axis; ++px)
          points_.push_back({{xc[0] + 0.5 * h * g.nodes[px], xc[1] + 0.5 * h * g.nodes[py]},
                             0.25 * g.weights[px] * g.weights[py] * vol, c});
    }
  }
  Q_ = points_.size();
  phi_.resize(n_ * Q_);
  dx_.resize(n_ * Q_);
  dy_.resize(n_ * Q_, 0.0);
  for (int i = 0; i < n_; ++i) {
    for (std::size_t q = 0; q < Q_; ++q) {
      phi_[i * Q_ + q] = eval_phi(i, points_[q].x);
      const Vec2 gr = eval_grad_phi(i, points_[q].x);
      dx_[i * Q_ + q] = gr[0];
      dy_[i * Q_ + q] = gr[1];
    }
  }
  msize_ = metric_size(dim_);
  metric_grad_.resize(Q_ * n_ * msize_);
  for (std::size_t q = 0; q < Q_; ++q)
    for (int i = 0; i < n_; ++i) to_metric(sym_grad(i, static_cast<int>(q)), &metric_grad_[(q * n_ + i) * msize_]);

  const auto& faces = mesh.interior_faces();
  nfaces_ = faces.size();
  face_flux_.assign(n_ * nfaces_, 0.0);
  for (int i = 0; i < n_; ++i) {
    const Mode& m = modes_[i];
    for (std::size_t f = 0; f < nfaces_; ++f) {
      const InteriorFace& face = faces[f];
      if (face.axis != m.component) continue;
      if (dim_ == 1) {
        face_flux_[i * nfaces_ + f] = eval_phi(i, face.center);
      } else if (face.axis == 0) {
        face_flux_[i * nfaces_ + f] = m.scale * std::sin(m.kx * kPi * face.center[0]) *
                                      sin_integral(m.ky, face.center[1] - 0.5 * h, face.center[1] + 0.5 * h);
      } else {
        face_flux_[i * nfaces_ + f] = m.scale * std::sin(m.ky * kPi * face.center[1]) *
                                      sin_integral(m.kx, face.center[0] - 0.5 * h, face.center[0] + 0.5 * h);
      }
    }
  }

  gram_ = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j <= i; ++j) {
      if (modes_[i].component != modes_[j].component) continue;
      double s = 0.0;
      for (std::size_t q = 0; q < Q_; ++q) s += points_[q].weight * phi_[i * Q_ + q] * phi_[j * Q_ + q];
      gram_(i, j) = gram_(j, i) = s;
    }
  gram_llt_.compute(gram_);
  if (gram_llt_.info() != Eigen::Success) throw ConfigError("galerkin: Gram matrix is not positive definite");
}

double GalerkinBasis::eval_phi(int i, const Vec2& x) const {
  const Mode& m = modes_[i];
  double v = m.scale * std::sin(m.kx * kPi * x[0]);
  if (dim_ == 2) v *= std::sin(m.ky * kPi * x[1]);
  return v;
}

Vec2 GalerkinBasis::eval_grad_phi(int i, const Vec2& x) const {
  const Mode& m = modes_[i];
  if (dim_ == 1) return {m.scale * m.kx * kPi * std::cos(m.kx * kPi * x[0]), 0.0};
  const double sx = std::sin(m.kx * kPi * x[0]), cx = std::cos(m.kx * kPi * x[0]);
  const double sy = std::sin(m.ky * kPi * x[1]), cy = std::cos(m.ky * kPi * x[1]);
  return {m.scale * m.kx * kPi * cx * sy, m.scale * m.ky * kPi * sx * cy};
}

SymTensor GalerkinBasis::sym_grad(int i, int q) const {
  const int a = modes_[i].component;
  double full[4] = {0.0, 0.0, 0.0, 0.0};
  for (int b = 0; b < dim_; ++b) full[a * dim_ + b] = dphi(i, q, b);
  return SymTensor::sym_part(dim_, full);
}

Eigen::VectorXd GalerkinBasis::project_points(const std::vector<double>& u) const {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n_);
  for (int i = 0; i < n_; ++i) {
    const int a = modes_[i].component;
    double s = 0.0;
    for (std::size_t q = 0; q < Q_; ++q) s += points_[q].weight * u[q * dim_ + a] * phi_[i * Q_ + q];
    b[i] = s;
  }
  return gram_llt_.solve(b);
}

Eigen::VectorXd GalerkinBasis::project(const std::function<Vec2(const Vec2&)>& f) const {
  std::vector<double> u(Q_ * dim_);
  for (std::size_t q = 0; q < Q_; ++q) {
    const Vec2 v = f(points_[q].x);
    for (int a = 0; a < dim_; ++a) u[q * dim_ + a] = v[a];
  }
  return project_points(u);
}

}  // namespace congesta
