#include "congesta/momentum.hpp"

#include <cmath>
#include <string>

namespace congesta {

MomentumSolver::MomentumSolver(const Mesh& mesh, const GalerkinBasis& basis, const BoundaryData& bd,
                               const MollifiedPotential& pot, const CongestionPressure& cp, double eps,
                               ExecPolicy policy)
    : mesh_(&mesh), basis_(&basis), bd_(&bd), pot_(&pot), cp_(&cp), eps_(eps), policy_(policy) {
  for (auto& axis : bface_)
    for (auto& side : axis) side.assign(mesh.num_cells(), -1);
  const auto& bnd = mesh.boundary_faces();
  for (std::size_t f = 0; f < bnd.size(); ++f) bface_[bnd[f].axis][bnd[f].side][bnd[f].cell] = static_cast<int>(f);
}

FaceFluxes MomentumSolver::face_fluxes(const Eigen::VectorXd& v) const {
  FaceFluxes a;
  const auto& inner = mesh_->interior_faces();
  a.interior.resize(inner.size());
  for (std::size_t f = 0; f < inner.size(); ++f) {
    // uB is affine: the midpoint rule is exact on the face
    double s = bd_->velocity(inner[f].center)[inner[f].axis] * mesh_->face_area();
    for (int i = 0; i < basis_->size(); ++i) s += v[i] * basis_->face_flux(i, static_cast<int>(f));
    a.interior[f] = s;
  }
  for (const auto& f : mesh_->boundary_faces()) a.boundary.push_back(f.flux);
  return a;
}

Vec2 MomentumSolver::grad_rho(const std::vector<double>& rho, const QuadPoint& p) const {
  const Mesh& m = *mesh_;
  const int c = p.cell;
  const double h = m.h();
  const int idx[2] = {m.ix(c), m.iy(c)};
  const int stride[2] = {1, m.n()};
  Vec2 g{0.0, 0.0};
  for (int b = 0; b < m.dim(); ++b) {
    double side_grad[2];
    for (int side = 0; side < 2; ++side) {
      const int f = bface_[b][side][c];
      if (f < 0) {
        const int nb = c + (side == 0 ? -stride[b] : stride[b]);
        side_grad[side] = side == 0 ? (rho[c] - rho[nb]) / h : (rho[nb] - rho[c]) / h;
      } else {
        const BoundaryFace& bf = m.boundary_faces()[f];
        // eps d rho/dn = (rhoB - rho)|uB . n| on the inflow part, 0 elsewhere
        const double dn = bf.inflow ? (bd_->rhoB - rho[c]) * (-bf.flux) / (eps_ * m.face_area()) : 0.0;
        side_grad[side] = bf.normal * dn;
      }
    }
    const double lo = idx[b] * h;
    const double s = (p.x[b] - lo) / h;
    g[b] = (1.0 - s) * side_grad[0] + s * side_grad[1];
  }
  return g;
}

void MomentumSolver::sample(const std::vector<double>& rho_old, const Eigen::VectorXd& v_old,
                            const std::vector<double>& rho_new, const Eigen::VectorXd& v,
                            std::vector<PointState>& pts) const {
  const GalerkinBasis& B = *basis_;
  const int d = B.dim(), n = B.size(), Q = B.num_points();
  pts.resize(Q);
#pragma omp parallel for schedule(static) if (policy_ == ExecPolicy::kParallel)
  for (int q = 0; q < Q; ++q) {
    const QuadPoint& qp = B.points()[q];
    PointState& p = pts[q];
    p.rho_old = rho_old[qp.cell];
    p.rho_new = rho_new[qp.cell];
    p.uB = bd_->velocity(qp.x);
    p.u = p.uB;
    p.u_old = p.uB;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) p.grad_u[a * 2 + b] = (a < d && b < d) ? bd_->spec.grad(a, b) : 0.0;
    for (int i = 0; i < n; ++i) {
      const int a = B.mode(i).component;
      const double ph = B.phi(i, q);
      p.u[a] += v[i] * ph;
      p.u_old[a] += v_old[i] * ph;
      for (int b = 0; b < d; ++b) p.grad_u[a * 2 + b] += v[i] * B.dphi(i, q, b);
    }
    p.grad_rho = grad_rho(rho_new, qp);
    double full[4];
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) full[a * d + b] = p.grad_u[a * 2 + b];
    p.D = SymTensor::sym_part(d, full);
    p.S = pot_->subgradient(p.D).stress;
  }
}

Eigen::VectorXd MomentumSolver::pressure_term(const std::vector<double>& rho) const {
  const auto& inner = mesh_->interior_faces();
  std::vector<double> pi(rho.size());
  for (std::size_t c = 0; c < rho.size(); ++c) pi[c] = cp_->pressure(rho[c], static_cast<int>(c));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(basis_->size());
  for (int j = 0; j < basis_->size(); ++j) {
    double s = 0.0;
    for (std::size_t f = 0; f < inner.size(); ++f)
      s += (pi[inner[f].left] - pi[inner[f].right]) * basis_->face_flux(j, static_cast<int>(f));
    out[j] = s;
  }
  return out;
}

Eigen::VectorXd MomentumSolver::update(const std::vector<double>& rho_old, const Eigen::VectorXd& v_old,
                                       const std::vector<double>& rho_new, const Eigen::VectorXd& v_it, double dt) {
  sample(rho_old, v_old, rho_new, v_it, pts_);
  assemble(*basis_, pts_, *pot_, true, policy_, asm_);
  const Eigen::VectorXd P = pressure_term(rho_new);
  const Eigen::VectorXd r = asm_.old_momentum - asm_.boundary_momentum +
                            dt * (asm_.convection + P - asm_.viscous - eps_ * asm_.eps_term) - asm_.mass * v_it;
  const Eigen::MatrixXd J = asm_.mass + dt * asm_.stiffness;
  Eigen::LLT<Eigen::MatrixXd> llt(J);
  if (llt.info() != Eigen::Success)
    throw SingularMassMatrix("momentum: system matrix is not positive definite (vacuum density?)");
  const Eigen::VectorXd v_new = v_it + llt.solve(r);
  if (!v_new.allFinite()) throw NewtonDivergence("momentum: Newton update produced non-finite coefficients");
  return v_new;
}

CoupledStep fixed_point_coupler(ContinuitySolver& cont, MomentumSolver& mom, const std::vector<double>& rho_prev,
                                const Eigen::VectorXd& v_prev, double dt, const CouplerOptions& opts) {
  if (!(opts.tol > 0.0)) throw ConfigError("coupler: tol must be > 0");
  CoupledStep out;
  Eigen::VectorXd v_it = v_prev;
  for (int it = 1; it <= opts.max_iter; ++it) {
    out.fluxes = mom.face_fluxes(v_it);
    if (opts.freeze_density) {
      out.rho = rho_prev;
      out.mass_fluxes = StepFluxes{};
    } else {
      out.rho = cont.step(rho_prev, out.fluxes, dt, &out.mass_fluxes);
    }
    Eigen::VectorXd v_new = mom.update(rho_prev, v_prev, out.rho, v_it, dt);
    const double change = (v_new - v_it).norm();
    const double scale = 1.0 + v_it.norm();
    v_it = std::move(v_new);
    if (change <= opts.tol * scale) {
      out.v = v_it;
      out.iterations = it;
      return out;
    }
  }
  throw FixedPointStall("coupler: no convergence after " + std::to_string(opts.max_iter) + " iterations");
}

}  // namespace congesta
