#include "congesta/kernels.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace congesta {

int kernel_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

void reset(Assembly& out, int n, bool with_stiffness) {
  out.old_momentum = Eigen::VectorXd::Zero(n);
  out.boundary_momentum = Eigen::VectorXd::Zero(n);
  out.convection = Eigen::VectorXd::Zero(n);
  out.viscous = Eigen::VectorXd::Zero(n);
  out.eps_term = Eigen::VectorXd::Zero(n);
  out.mass = Eigen::MatrixXd::Zero(n, n);
  if (with_stiffness) out.stiffness = Eigen::MatrixXd::Zero(n, n);
  else out.stiffness.resize(0, 0);
}

constexpr int kMaxMetric = 3;

// Scalar integrands of the vector terms for test mode j at point q. `sm` is the
// stress in metric coordinates and `dwj` the metric sym-grad of mode j.
struct RowTerms {
  double old_m, bnd_m, conv, visc, eps;
};

inline RowTerms row_terms(const GalerkinBasis& basis, const PointState& p, const double* sm, const double* dwj, int j,
                          int q) {
  const int d = basis.dim();
  const int m = basis.metric_width();
  const int a = basis.mode(j).component;
  const double phi = basis.phi(j, q);
  double u_grad_phi = 0.0, grho_grad_ua = 0.0, visc = 0.0;
  for (int b = 0; b < d; ++b) {
    u_grad_phi += p.u[b] * basis.dphi(j, q, b);
    grho_grad_ua += p.grad_rho[b] * p.grad_u[a * 2 + b];
  }
  for (int k = 0; k < m; ++k) visc += sm[k] * dwj[k];
  return {p.rho_old * p.u_old[a] * phi, p.rho_new * p.uB[a] * phi, p.rho_new * p.u[a] * u_grad_phi, visc,
          grho_grad_ua * phi};
}

// Hessian at one point as a symmetric m x m matrix in metric coordinates.
void tangent_matrix(const MollifiedPotential& pot, const SymTensor& D, int m, double* T) {
  const TangentMap map = pot.tangent_at(D);
  for (int l = 0; l < m; ++l) {
    double e[kMaxMetric] = {0.0, 0.0, 0.0};
    e[l] = 1.0;
    double col[kMaxMetric];
    to_metric(map.apply(from_metric(D.dim(), e)), col);
    for (int k = 0; k < m; ++k) T[k * m + l] = col[k];
  }
}

// hw_i = w T dw_i for every mode at one point.
void weighted_tangent(const double* T, const double* dw, double w, int n, int m, double* hw) {
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < m; ++k) {
      double s = 0.0;
      for (int l = 0; l < m; ++l) s += T[k * m + l] * dw[i * m + l];
      hw[i * m + k] = w * s;
    }
}

void assemble_serial(const GalerkinBasis& basis, const std::vector<PointState>& pts, const MollifiedPotential& pot,
                     bool with_stiffness, Assembly& out) {
  const int n = basis.size();
  const int m = basis.metric_width();
  std::vector<double> hw(std::size_t(n) * m);
  double T[kMaxMetric * kMaxMetric], sm[kMaxMetric];
  for (int q = 0; q < basis.num_points(); ++q) {
    const PointState& p = pts[q];
    const double w = basis.points()[q].weight;
    const double* dw = basis.metric_grad(q);
    to_metric(p.S, sm);
    if (with_stiffness) {
      tangent_matrix(pot, p.D, m, T);
      weighted_tangent(T, dw, w, n, m, hw.data());
    }
    for (int j = 0; j < n; ++j) {
      const RowTerms t = row_terms(basis, p, sm, dw + j * m, j, q);
      out.old_momentum[j] += w * t.old_m;
      out.boundary_momentum[j] += w * t.bnd_m;
      out.convection[j] += w * t.conv;
      out.viscous[j] += w * t.visc;
      out.eps_term[j] += w * t.eps;
      for (int i = 0; i < n; ++i) {
        if (basis.mode(i).component == basis.mode(j).component)
          out.mass(i, j) += w * p.rho_new * basis.phi(i, q) * basis.phi(j, q);
        if (with_stiffness) {
          double s = 0.0;
          for (int k = 0; k < m; ++k) s += hw[i * m + k] * dw[j * m + k];
          out.stiffness(i, j) += s;
        }
      }
    }
  }
}

void assemble_parallel(const GalerkinBasis& basis, const std::vector<PointState>& pts, const MollifiedPotential& pot,
                       bool with_stiffness, Assembly& out) {
  const int n = basis.size();
  const int Q = basis.num_points();
  const int m = basis.metric_width();
  std::vector<double> hw, sm(std::size_t(Q) * m);
  if (with_stiffness) hw.resize(std::size_t(Q) * n * m);
  std::exception_ptr err;
#pragma omp parallel for schedule(static)
  for (int q = 0; q < Q; ++q) {
    try {
      to_metric(pts[q].S, &sm[std::size_t(q) * m]);
      if (with_stiffness) {
        double T[kMaxMetric * kMaxMetric];
        tangent_matrix(pot, pts[q].D, m, T);
        weighted_tangent(T, basis.metric_grad(q), basis.points()[q].weight, n, m, &hw[std::size_t(q) * n * m]);
      }
    } catch (...) {
#pragma omp critical(congesta_kernel_error)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);

#pragma omp parallel for schedule(dynamic, 1)
  for (int j = 0; j < n; ++j) {
    double om = 0, bm = 0, cv = 0, vs = 0, ep = 0;
    std::vector<double> mrow(n, 0.0), srow(with_stiffness ? n : 0, 0.0);
    const int aj = basis.mode(j).component;
    for (int q = 0; q < Q; ++q) {
      const PointState& p = pts[q];
      const double w = basis.points()[q].weight;
      const double* dwj = basis.metric_grad(q) + j * m;
      const RowTerms t = row_terms(basis, p, &sm[std::size_t(q) * m], dwj, j, q);
      om += w * t.old_m;
      bm += w * t.bnd_m;
      cv += w * t.conv;
      vs += w * t.visc;
      ep += w * t.eps;
      const double wrp = w * p.rho_new * basis.phi(j, q);
      for (int i = 0; i < n; ++i) {
        if (basis.mode(i).component == aj) mrow[i] += wrp * basis.phi(i, q);
        if (with_stiffness) {
          const double* h = &hw[(std::size_t(q) * n + i) * m];
          double s = 0.0;
          for (int k = 0; k < m; ++k) s += h[k] * dwj[k];
          srow[i] += s;
        }
      }
    }
    out.old_momentum[j] = om;
    out.boundary_momentum[j] = bm;
    out.convection[j] = cv;
    out.viscous[j] = vs;
    out.eps_term[j] = ep;
    for (int i = 0; i < n; ++i) {
      out.mass(i, j) = mrow[i];
      if (with_stiffness) out.stiffness(i, j) = srow[i];
    }
  }
}

}  // namespace

void assemble(const GalerkinBasis& basis, const std::vector<PointState>& pts, const MollifiedPotential& pot,
              bool with_stiffness, ExecPolicy policy, Assembly& out) {
  if (static_cast<int>(pts.size()) != basis.num_points())
    throw DimensionMismatch("assemble: point state count does not match the quadrature");
  reset(out, basis.size(), with_stiffness);
  if (policy == ExecPolicy::kSerial) assemble_serial(basis, pts, pot, with_stiffness, out);
  else assemble_parallel(basis, pts, pot, with_stiffness, out);
}

}  // namespace congesta
