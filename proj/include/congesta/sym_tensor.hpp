#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

#include "congesta/errors.hpp"

namespace congesta {

/// Symmetric d x d tensor, d in {1,2,3}. Only the upper triangle is stored
/// (row-major packing), so symmetry holds by construction.
class SymTensor {
 public:
  static constexpr int kMaxDim = 3;

  SymTensor() = default;
  explicit SymTensor(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) throw DimensionMismatch("SymTensor dimension must be 1, 2 or 3");
  }

  static SymTensor identity(int dim) {
    SymTensor t(dim);
    for (int i = 0; i < dim; ++i) t(i, i) = 1.0;
    return t;
  }
  static SymTensor diag(std::initializer_list<double> values) {
    SymTensor t(static_cast<int>(values.size()));
    int i = 0;
    for (double v : values) t(i, i) = v, ++i;
    return t;
  }
  /// Symmetric part of a full row-major d x d matrix.
  static SymTensor sym_part(int dim, const double* full) {
    SymTensor t(dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) t(i, j) = 0.5 * (full[i * dim + j] + full[j * dim + i]);
    return t;
  }

  int dim() const { return dim_; }
  int size() const { return dim_ * (dim_ + 1) / 2; }

  double& operator()(int i, int j) { return data_[index(i, j)]; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }
  double& component(int k) { return data_[k]; }
  double component(int k) const { return data_[k]; }

  double trace() const {
    double tr = 0.0;
    for (int i = 0; i < dim_; ++i) tr += (*this)(i, i);
    return tr;
  }
  double norm() const { return std::sqrt(norm_sq()); }
  double norm_sq() const;

  SymTensor& operator+=(const SymTensor& o);
  SymTensor& operator-=(const SymTensor& o);
  SymTensor& operator*=(double s) {
    for (int k = 0; k < size(); ++k) data_[k] *= s;
    return *this;
  }

  friend SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
  friend SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
  friend SymTensor operator*(double s, SymTensor a) { return a *= s; }
  friend SymTensor operator*(SymTensor a, double s) { return a *= s; }

 private:
  int index(int i, int j) const {
    if (i > j) std::swap(i, j);
    // Row i of the packed upper triangle starts after i*d - i*(i-1)/2 entries.
    return i * dim_ - i * (i - 1) / 2 + (j - i);
  }

  int dim_ = 1;
  std::array<double, 6> data_{};
};

/// Frobenius pairing sum_ij A_ij B_ij. Off-diagonal entries count twice.
double contract(const SymTensor& a, const SymTensor& b);

/// Traceless part T0 and trace tau with T = T0 + (tau/d) I.
std::pair<SymTensor, double> deviatoric_split(const SymTensor& t);

/// Packed coordinates with off-diagonal entries scaled by sqrt(2), so that
/// contract(a, b) is the Euclidean dot product of the coordinate vectors.
inline int metric_size(int d) { return d * (d + 1) / 2; }
void to_metric(const SymTensor& t, double* out);
SymTensor from_metric(int d, const double* x);

inline SymTensor deviatoric(const SymTensor& t) { return deviatoric_split(t).first; }

}  // namespace congesta
