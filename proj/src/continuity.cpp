#include "congesta/continuity.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "congesta/quadrature.hpp"

namespace congesta {

FaceFluxes face_fluxes_from_field(const Mesh& mesh, const std::function<Vec2(const Vec2&)>& u) {
  const GaussRule& g = gauss_legendre_cached(4);
  auto face_integral = [&](Vec2 center, int axis) {
    if (mesh.dim() == 1) return u(center)[0];
    const int other = 1 - axis;
    double s = 0.0;
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
      Vec2 x = center;
      x[other] += 0.5 * mesh.h() * g.nodes[k];
      s += 0.5 * g.weights[k] * u(x)[axis];
    }
    return s * mesh.face_area();
  };
  FaceFluxes a;
  for (const auto& f : mesh.interior_faces()) a.interior.push_back(face_integral(f.center, f.axis));
  for (const auto& f : mesh.boundary_faces()) a.boundary.push_back(f.normal * face_integral(f.center, f.axis));
  return a;
}

std::vector<double> discrete_divergence(const Mesh& mesh, const FaceFluxes& a) {
  std::vector<double> div(mesh.num_cells(), 0.0);
  const auto& inner = mesh.interior_faces();
  for (std::size_t f = 0; f < inner.size(); ++f) {
    div[inner[f].left] += a.interior[f];
    div[inner[f].right] -= a.interior[f];
  }
  const auto& bnd = mesh.boundary_faces();
  for (std::size_t f = 0; f < bnd.size(); ++f) div[bnd[f].cell] += a.boundary[f];
  for (double& v : div) v /= mesh.cell_volume();
  return div;
}

double total_mass(const Mesh& mesh, const std::vector<double>& rho) {
  double s = 0.0;
  for (double r : rho) s += r;
  return s * mesh.cell_volume();
}

// ---------------------------------------------------------------------------

struct ContinuitySolver::Impl {
  using SpMat = Eigen::SparseMatrix<double>;
  SpMat A;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  std::vector<Eigen::Triplet<double>> trip;
};

ContinuitySolver::ContinuitySolver(const Mesh& mesh, const BoundaryData& bd, double eps)
    : mesh_(&mesh), bd_(&bd), eps_(eps), impl_(std::make_unique<Impl>()) {
  if (!(eps > 0.0)) throw ConfigError("continuity: eps must be > 0");
  const int n = mesh.num_cells();
  impl_->A.resize(n, n);
}

ContinuitySolver::~ContinuitySolver() = default;
ContinuitySolver::ContinuitySolver(ContinuitySolver&&) noexcept = default;
ContinuitySolver& ContinuitySolver::operator=(ContinuitySolver&&) noexcept = default;

std::vector<double> ContinuitySolver::step(const std::vector<double>& rho_old, const FaceFluxes& a, double dt,
                                           StepFluxes* fluxes) {
  const Mesh& m = *mesh_;
  const int n = m.num_cells();
  const double vol = m.cell_volume();
  const double dcoef = eps_ * m.face_area() / m.h();
  const auto& inner = m.interior_faces();
  const auto& bnd = m.boundary_faces();
  if (a.interior.size() != inner.size() || a.boundary.size() != bnd.size())
    throw DimensionMismatch("continuity: face flux arrays do not match the mesh");

  auto& trip = impl_->trip;
  trip.clear();
  trip.reserve(n + 4 * inner.size());
  std::vector<double> diag(n, vol / dt);
  Eigen::VectorXd rhs(n);
  for (int c = 0; c < n; ++c) rhs[c] = vol / dt * rho_old[c];

  for (std::size_t f = 0; f < inner.size(); ++f) {
    const int L = inner[f].left, R = inner[f].right;
    const double up = std::max(a.interior[f], 0.0), down = std::max(-a.interior[f], 0.0);
    // row L: + up rho_L - down rho_R - dcoef (rho_R - rho_L)
    diag[L] += up + dcoef;
    trip.emplace_back(L, R, -down - dcoef);
    diag[R] += down + dcoef;
    trip.emplace_back(R, L, -up - dcoef);
  }
  for (std::size_t f = 0; f < bnd.size(); ++f) {
    const double af = a.boundary[f];
    if (af >= 0.0) diag[bnd[f].cell] += af;
    else rhs[bnd[f].cell] += -af * bd_->rhoB;
  }

  // M-matrix audit: nonpositive off-diagonals, weakly dominant columns.
  std::vector<double> colsum(diag);
  for (const auto& t : trip) {
    if (t.value() > 0.0) throw NonMonotoneScheme("continuity: positive off-diagonal entry");
    colsum[t.col()] += t.value();
  }
  for (int c = 0; c < n; ++c) {
    if (colsum[c] < -1e-12 * diag[c])
      throw NonMonotoneScheme("continuity: column " + std::to_string(c) + " is not diagonally dominant");
    trip.emplace_back(c, c, diag[c]);
  }

  impl_->A.setFromTriplets(trip.begin(), trip.end());
  if (!impl_->analyzed) {
    impl_->lu.analyzePattern(impl_->A);
    impl_->analyzed = true;
  }
  impl_->lu.factorize(impl_->A);
  if (impl_->lu.info() != Eigen::Success) throw LinearSolveFailure("continuity: sparse LU factorization failed");
  Eigen::VectorXd x = impl_->lu.solve(rhs);
  if (impl_->lu.info() != Eigen::Success) throw LinearSolveFailure("continuity: sparse LU solve failed");

  std::vector<double> rho(x.data(), x.data() + n);
  for (double r : rho)
    if (!std::isfinite(r)) throw LinearSolveFailure("continuity: non-finite density");

  if (fluxes) {
    *fluxes = StepFluxes{};
    for (std::size_t f = 0; f < bnd.size(); ++f) {
      const double af = a.boundary[f], rc = rho[bnd[f].cell];
      if (af >= 0.0) {
        fluxes->outflow += dt * af * rc;
      } else {
        fluxes->inflow += dt * (-af) * rc;
        fluxes->diffusive += dt * (-af) * (bd_->rhoB - rc);
      }
    }
  }
  return rho;
}

// ---------------------------------------------------------------------------

double MassLedger::record(double new_mass, const StepFluxes& f) {
  const double r = (new_mass - mass_) + f.outflow - f.inflow - f.diffusive;
  mass_ = new_mass;
  inflow_ += f.inflow;
  outflow_ += f.outflow;
  diffusive_ += f.diffusive;
  max_step_ = std::max(max_step_, std::abs(r));
  return r;
}

Renormalization Renormalization::identity() {
  return {[](double z) { return z; }, [](double) { return 1.0; }};
}

Renormalization Renormalization::square() {
  return {[](double z) { return z * z; }, [](double z) { return 2.0 * z; }};
}

Renormalization Renormalization::entropy(double floor) {
  return {[floor](double z) { return z * std::log(std::max(z, floor)); },
          [floor](double z) { return std::log(std::max(z, floor)) + 1.0; }};
}

RenormResidual renormalized_residual(const Mesh& mesh, const BoundaryData& bd, double eps,
                                     const std::vector<double>& rho_old, const std::vector<double>& rho_new,
                                     const FaceFluxes& a, double dt, const Renormalization& B) {
  RenormResidual r;
  const int n = mesh.num_cells();
  const double vol = mesh.cell_volume();
  std::vector<double> dB(n);
  for (int c = 0; c < n; ++c) {
    const double b1 = B.B(rho_new[c]), b0 = B.B(rho_old[c]);
    dB[c] = B.dB(rho_new[c]);
    r.change += vol * (b1 - b0);
    r.time_bregman += vol * (b0 - b1 - dB[c] * (rho_old[c] - rho_new[c]));
  }
  const auto& inner = mesh.interior_faces();
  const double dcoef = eps * mesh.face_area() / mesh.h();
  double transport = 0.0, diffusion = 0.0;
  for (std::size_t f = 0; f < inner.size(); ++f) {
    const int L = inner[f].left, R = inner[f].right;
    const double af = a.interior[f];
    const double flux = std::max(af, 0.0) * rho_new[L] - std::max(-af, 0.0) * rho_new[R];
    transport -= (dB[L] - dB[R]) * flux;
    diffusion -= dcoef * (dB[R] - dB[L]) * (rho_new[R] - rho_new[L]);
  }
  const auto& bnd = mesh.boundary_faces();
  for (std::size_t f = 0; f < bnd.size(); ++f) {
    const double af = a.boundary[f];
    const int c = bnd[f].cell;
    transport -= dB[c] * af * (af >= 0.0 ? rho_new[c] : bd.rhoB);
  }
  r.transport = dt * transport;
  r.diffusion = dt * diffusion;
  r.residual = r.change - r.transport - r.diffusion;
  return r;
}

// ---------------------------------------------------------------------------

MaxPrincipleTracker::MaxPrincipleTracker(const std::vector<double>& rho0, const BoundaryData& bd, bool has_inflow) {
  data_max_ = *std::max_element(rho0.begin(), rho0.end());
  data_min_ = *std::min_element(rho0.begin(), rho0.end());
  if (has_inflow) {
    data_max_ = std::max(data_max_, bd.rhoB);
    data_min_ = std::min(data_min_, bd.rhoB);
  }
  uB_sup_ = bd.sup_norm;
  discrete_ = data_max_;
  sup_rho_ = data_max_;
  inf_rho_ = *std::min_element(rho0.begin(), rho0.end());
}

void MaxPrincipleTracker::record(const std::vector<double>& rho, const std::vector<double>& div, double dt) {
  double dmin = 0.0, dabs = 0.0;
  for (double d : div) {
    dmin = std::min(dmin, d);
    dabs = std::max(dabs, std::abs(d));
  }
  sup_div_ = std::max(sup_div_, dabs);
  t_ += dt;
  const double shrink = 1.0 - dt * (-dmin);
  discrete_ = shrink > 0.0 ? discrete_ / shrink : std::numeric_limits<double>::infinity();
  for (double r : rho) {
    sup_rho_ = std::max(sup_rho_, r);
    inf_rho_ = std::min(inf_rho_, r);
  }
}

double MaxPrincipleTracker::formula_bound() const {
  return std::max({data_max_, uB_sup_}) * std::exp(t_ * sup_div_);
}

double MaxPrincipleTracker::bound() const { return std::max(formula_bound(), discrete_); }

double MaxPrincipleTracker::positivity_floor() const { return data_min_ * std::exp(-t_ * sup_div_); }

void MaxPrincipleTracker::check() const {
  if (sup_rho_ > bound() * (1.0 + 1e-10))
    throw MaxPrincipleViolated("continuity: sup rho = " + std::to_string(sup_rho_) +
                               " exceeds the maximum-principle bound " + std::to_string(bound()));
}

}  // namespace congesta
