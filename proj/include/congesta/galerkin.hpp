#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "congesta/domain.hpp"
#include "congesta/sym_tensor.hpp"

namespace congesta {

/// One velocity mode w = phi(x) e_component with phi a sine product.
struct Mode {
  int kx = 1, ky = 0;  // ky = 0 in 1D
  int component = 0;
  double scale = 1.0;  // sqrt(2) in 1D, 2 in 2D
};

struct QuadPoint {
  Vec2 x{0.0, 0.0};
  double weight = 0.0;  // includes the cell volume
  int cell = 0;
};

/// Sine modes on the unit box, L2-orthonormal and vanishing on the boundary, with
/// values and gradients tabulated at cellwise Gauss-Legendre points.
/// 1D: w_k = sqrt(2) sin(k pi x). 2D: 2 sin(k pi x) sin(l pi y) e_a, pairs (k,l)
/// ordered by k^2 + l^2, components alternating.
class GalerkinBasis {
 public:
  GalerkinBasis(const Mesh& mesh, int n_modes, int points_per_axis);

  int size() const { return n_; }
  int dim() const { return dim_; }
  const Mode& mode(int i) const { return modes_[i]; }
  const std::vector<QuadPoint>& points() const { return points_; }
  int num_points() const { return static_cast<int>(points_.size()); }
  int points_per_cell() const { return ppc_; }

  /// Scalar amplitude phi_i and its gradient at quadrature point q.
  double phi(int i, int q) const { return phi_[std::size_t(i) * Q_ + q]; }
  double dphi(int i, int q, int b) const { return (b == 0 ? dx_ : dy_)[std::size_t(i) * Q_ + q]; }
  /// Symmetric gradient of w_i at point q.
  SymTensor sym_grad(int i, int q) const;
  /// Metric coordinates of sym_grad(i, q) for all modes at point q: n blocks of metric_size(dim).
  const double* metric_grad(int q) const { return &metric_grad_[std::size_t(q) * n_ * msize_]; }
  int metric_width() const { return msize_; }

  /// Exact integral of w_i . n over interior face f (n from left to right cell).
  double face_flux(int i, int f) const { return face_flux_[std::size_t(i) * nfaces_ + f]; }

  /// Pointwise evaluation (outside the tables).
  double eval_phi(int i, const Vec2& x) const;
  Vec2 eval_grad_phi(int i, const Vec2& x) const;

  /// Discrete Gram matrix sum_q w_q w_i . w_j.
  const Eigen::MatrixXd& gram() const { return gram_; }

  /// L2 projection onto the span: solves G c = (int f . w_j)_j with the discrete Gram matrix.
  Eigen::VectorXd project(const std::function<Vec2(const Vec2&)>& f) const;
  /// Projection of a field given by its values at the quadrature points (u[q*dim + a]).
  Eigen::VectorXd project_points(const std::vector<double>& u) const;

 private:
  int dim_, n_, ppc_, msize_ = 1;
  std::size_t Q_ = 0, nfaces_ = 0;
  std::vector<Mode> modes_;
  std::vector<QuadPoint> points_;
  std::vector<double> phi_, dx_, dy_, face_flux_, metric_grad_;
  Eigen::MatrixXd gram_;
  Eigen::LLT<Eigen::MatrixXd> gram_llt_;
};

}  // namespace congesta
