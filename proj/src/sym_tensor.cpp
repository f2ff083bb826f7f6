#include "congesta/sym_tensor.hpp"

#include <numbers>

namespace congesta {

double SymTensor::norm_sq() const { return contract(*this, *this); }

SymTensor& SymTensor::operator+=(const SymTensor& o) {
  if (o.dim_ != dim_) throw DimensionMismatch("SymTensor += with different dimensions");
  for (int k = 0; k < size(); ++k) data_[k] += o.data_[k];
  return *this;
}

SymTensor& SymTensor::operator-=(const SymTensor& o) {
  if (o.dim_ != dim_) throw DimensionMismatch("SymTensor -= with different dimensions");
  for (int k = 0; k < size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

void to_metric(const SymTensor& t, double* out) {
  int k = 0;
  for (int i = 0; i < t.dim(); ++i)
    for (int j = i; j < t.dim(); ++j, ++k) out[k] = t.component(k) * (i == j ? 1.0 : std::numbers::sqrt2);
}

SymTensor from_metric(int d, const double* x) {
  SymTensor t(d);
  int k = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j, ++k) t.component(k) = x[k] / (i == j ? 1.0 : std::numbers::sqrt2);
  return t;
}

double contract(const SymTensor& a, const SymTensor& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("contract: tensors of different dimension");
  const int d = a.dim();
  double diag = 0.0, off = 0.0;
  for (int i = 0; i < d; ++i) {
    diag += a(i, i) * b(i, i);
    for (int j = i + 1; j < d; ++j) off += a(i, j) * b(i, j);
  }
  return diag + 2.0 * off;
}

std::pair<SymTensor, double> deviatoric_split(const SymTensor& t) {
  const double tau = t.trace();
  SymTensor dev = t;
  const double mean = tau / t.dim();
  for (int i = 0; i < t.dim(); ++i) dev(i, i) -= mean;
  return {dev, tau};
}

}  // namespace congesta
