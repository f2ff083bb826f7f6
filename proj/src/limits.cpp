#include "congesta/limits.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

namespace congesta {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDefectFloor = 1e-8;

int block_of(const Mesh& mesh, int cell, int block) {
  const int nb = mesh.n() / block;
  const int bx = mesh.ix(cell) / block;
  return mesh.dim() == 1 ? bx : bx + nb * (mesh.iy(cell) / block);
}

// Block sums of rho, rho u and rho u (x) u.
struct BlockMoments {
  std::vector<double> w, m0;
  std::vector<std::array<double, 2>> m1;
  std::vector<std::array<double, 4>> m2;
};

BlockMoments block_moments(const Mesh& mesh, const std::vector<QuadPoint>& pts, const std::vector<double>& rho_pts,
                           const std::vector<double>& u_pts, int block) {
  if (block < 4) throw ConfigError("defect estimator: blocks need at least 4 cells per side");
  if (mesh.n() % block != 0)
    throw ConfigError("defect estimator: block " + std::to_string(block) + " does not divide resolution " +
                      std::to_string(mesh.n()));
  const int d = mesh.dim();
  const int nb = mesh.n() / block;
  const int nblocks = d == 1 ? nb : nb * nb;
  BlockMoments M;
  M.w.assign(nblocks, 0.0);
  M.m0.assign(nblocks, 0.0);
  M.m1.assign(nblocks, {0.0, 0.0});
  M.m2.assign(nblocks, {0.0, 0.0, 0.0, 0.0});
  for (std::size_t q = 0; q < pts.size(); ++q) {
    const int b = block_of(mesh, pts[q].cell, block);
    const double w = pts[q].weight, r = rho_pts[q];
    M.w[b] += w;
    M.m0[b] += w * r;
    for (int a = 0; a < d; ++a) {
      const double ua = u_pts[q * d + a];
      M.m1[b][a] += w * r * ua;
      for (int c = 0; c < d; ++c) M.m2[b][a * 2 + c] += w * r * ua * u_pts[q * d + c];
    }
  }
  return M;
}

// Full velocity at every quadrature point.
std::vector<double> point_velocity(const Simulation& sim, const Eigen::VectorXd& v) {
  const GalerkinBasis& B = sim.basis();
  const int d = B.dim();
  std::vector<double> u(std::size_t(B.num_points()) * d);
  for (int q = 0; q < B.num_points(); ++q) {
    const Vec2 ub = sim.boundary().velocity(B.points()[q].x);
    for (int a = 0; a < d; ++a) u[std::size_t(q) * d + a] = ub[a];
    for (int i = 0; i < B.size(); ++i) u[std::size_t(q) * d + B.mode(i).component] += v[i] * B.phi(i, q);
  }
  return u;
}

std::vector<double> point_density(const Simulation& sim, const std::vector<double>& rho) {
  const auto& pts = sim.basis().points();
  std::vector<double> r(pts.size());
  for (std::size_t q = 0; q < pts.size(); ++q) r[q] = rho[pts[q].cell];
  return r;
}

bool interior_cell(const Mesh& mesh, int c) {
  const int N = mesh.n();
  const int ix = mesh.ix(c);
  if (ix == 0 || ix == N - 1) return false;
  if (mesh.dim() == 2) {
    const int iy = mesh.iy(c);
    if (iy == 0 || iy == N - 1) return false;
  }
  return true;
}

// Telescoped weak residual for the time factor p:
//   [p A]_0^K - sum (p_{k+1} - p_k) A_k - sum dt_k p_{k+1} G_{k+1}
template <class P>
double weak_residual(P p, const std::vector<double>& s, const std::vector<double>& dt, const std::vector<double>& A,
                     const std::vector<double>& G) {
  const std::size_t K = s.size() - 1;
  double r = p(s[K]) * A[K] - p(s[0]) * A[0];
  for (std::size_t k = 0; k < K; ++k) r -= (p(s[k + 1]) - p(s[k])) * A[k] + dt[k] * p(s[k + 1]) * G[k + 1];
  return r;
}

}  // namespace

DefectEstimate estimate_defect(const Mesh& mesh, const std::vector<QuadPoint>& pts, const std::vector<double>& rho_pts,
                               const std::vector<double>& u_pts, int block, double d_lower, double d_upper) {
  const BlockMoments M = block_moments(mesh, pts, rho_pts, u_pts, block);
  const int d = mesh.dim();
  const std::size_t nblocks = M.w.size();
  DefectEstimate e;
  e.block = block;
  e.blocks_per_axis = mesh.n() / block;
  e.reynolds_trace.assign(nblocks, 0.0);
  e.kinetic_defect.assign(nblocks, 0.0);
  e.reynolds.assign(nblocks, {0.0, 0.0, 0.0, 0.0});
  e.min_trace = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < nblocks; ++b) {
    const double W = M.w[b];
    const double rbar = M.m0[b] / W;
    std::array<double, 4> R{0.0, 0.0, 0.0, 0.0};
    double tr = 0.0;
    if (rbar > 0.0) {
      for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c)
          R[a * 2 + c] = M.m2[b][a * 2 + c] / W - (M.m1[b][a] / W) * (M.m1[b][c] / W) / rbar;
      for (int a = 0; a < d; ++a) tr += R[a * 2 + a];
    }
    e.min_trace = std::min(e.min_trace, tr);
    if (tr < -kDefectFloor)
      throw NegativeDefect("defect estimator: block " + std::to_string(b) + " has trace " + std::to_string(tr));
    if (tr < 0.0) {
      tr = 0.0;
      R = {0.0, 0.0, 0.0, 0.0};
      ++e.clamped;
    }
    const double E = 0.5 * tr;
    e.reynolds[b] = R;
    e.reynolds_trace[b] = tr;
    e.kinetic_defect[b] = E;
    e.max_trace = std::max(e.max_trace, tr);
    e.integral_trace += W * tr;
    e.integral_kinetic += W * E;
    if (E > 1e-10 && (tr < d_lower * E * (1.0 - 1e-12) || tr > d_upper * E * (1.0 + 1e-12))) e.ratio_bounds_ok = false;
  }
  return e;
}

DefectEstimate estimate_defect(const Simulation& sim, const std::vector<double>& rho, const Eigen::VectorXd& v) {
  const LimitsConfig& L = sim.config().limits;
  return estimate_defect(sim.mesh(), sim.basis().points(), point_density(sim, rho), point_velocity(sim, v), L.block,
                         L.d_lower, L.d_upper);
}

namespace {

// sin(k pi x) times a cutoff that is 0 within `inset` of either end, rises linearly over
// the next `inset` and is 1 beyond.
double inset_sine(int k, double x, double inset, bool derivative) {
  const double e = std::min(x, 1.0 - x);
  const double sgn = x < 0.5 ? 1.0 : -1.0;
  double chi = 1.0, dchi = 0.0;
  if (e <= inset) {
    chi = 0.0;
  } else if (e < 2.0 * inset) {
    chi = (e - inset) / inset;
    dchi = sgn / inset;
  }
  const double s = std::sin(k * kPi * x);
  return derivative ? chi * k * kPi * std::cos(k * kPi * x) + dchi * s : chi * s;
}

}  // namespace

double TestFunction::value(int dim, bool vector, const Vec2& x) const {
  if (vector) {
    double v = inset_sine(kx, x[0], inset, false);
    if (dim == 2) v *= inset_sine(ky, x[1], inset, false);
    return v;
  }
  double v = std::cos(kx * kPi * x[0]);
  if (dim == 2) v *= std::cos(ky * kPi * x[1]);
  return v;
}

Vec2 TestFunction::grad(int dim, bool vector, const Vec2& x) const {
  if (vector) {
    const double sx = inset_sine(kx, x[0], inset, false), dx = inset_sine(kx, x[0], inset, true);
    if (dim == 1) return {dx, 0.0};
    const double sy = inset_sine(ky, x[1], inset, false), dy = inset_sine(ky, x[1], inset, true);
    return {dx * sy, sx * dy};
  }
  const double cx = std::cos(kx * kPi * x[0]), gx = -kx * kPi * std::sin(kx * kPi * x[0]);
  if (dim == 1) return {gx, 0.0};
  const double cy = std::cos(ky * kPi * x[1]), gy = -ky * kPi * std::sin(ky * kPi * x[1]);
  return {gx * cy, cx * gy};
}

TestBank make_test_bank(int dim, double inset) {
  TestBank bank;
  bank.version = "bank-v1";  // bump when the shapes or time factors change
  bank.dim = dim;
  struct Shape {
    int kx, ky, comp;
  };
  std::vector<Shape> scal, vec;
  if (dim == 1) {
    for (int k = 0; k < 5; ++k) scal.push_back({k, 0, 0});
    for (int k = 1; k <= 5; ++k) vec.push_back({k, 0, 0});
  } else {
    scal = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {2, 0, 0}};
    vec = {{1, 1, 0}, {1, 1, 1}, {2, 1, 0}, {1, 2, 1}, {2, 2, 0}};
  }
  for (int m = 0; m < 4; ++m) {
    for (const Shape& s : scal) bank.scalar.push_back({m, s.kx, s.ky, 0});
    for (const Shape& s : vec) bank.vector.push_back({m, s.kx, s.ky, s.comp, inset});
  }
  return bank;
}

DissipativeVerdict dissipative_verdict(const Simulation& sim, const RunRecord& rec, const TestBank& bank) {
  const Mesh& mesh = sim.mesh();
  const GalerkinBasis& B = sim.basis();
  const BoundaryData& bd = sim.boundary();
  const CongestionPressure& cp = sim.pressure();
  const RunConfig& cfg = sim.config();
  const double eps = cfg.scheme.eps;
  const int d = mesh.dim();
  const auto& pts = B.points();
  const int Q = B.num_points();
  const auto& snaps = rec.snapshots;

  DissipativeVerdict out;
  out.bank_version = bank.version;
  out.bank_size = static_cast<int>(bank.scalar.size() + bank.vector.size());
  if (snaps.size() < 2) return out;

  // Spatial shapes: the bank repeats them across time powers.
  auto unique_shapes = [](const std::vector<TestFunction>& fs) {
    std::vector<TestFunction> u;
    for (const TestFunction& f : fs) {
      bool seen = false;
      for (const TestFunction& g : u) seen |= g.kx == f.kx && g.ky == f.ky && g.component == f.component;
      if (!seen) u.push_back({0, f.kx, f.ky, f.component});
    }
    return u;
  };
  const std::vector<TestFunction> sshape = unique_shapes(bank.scalar);
  const std::vector<TestFunction> vshape = unique_shapes(bank.vector);
  auto shape_index = [](const std::vector<TestFunction>& u, const TestFunction& f) {
    for (std::size_t i = 0; i < u.size(); ++i)
      if (u[i].kx == f.kx && u[i].ky == f.ky && u[i].component == f.component) return i;
    return std::size_t(0);
  };

  const std::size_t K = snaps.size();
  const double T = snaps.back().t;
  std::vector<double> s(K), dt(K - 1);
  for (std::size_t k = 0; k < K; ++k) s[k] = T > 0.0 ? snaps[k].t / T : 0.0;
  for (std::size_t k = 0; k + 1 < K; ++k) dt[k] = snaps[k + 1].t - snaps[k].t;

  // A: int rho psi; G: spatial continuity terms. Bm: int rho u . psi e_a; H: momentum terms.
  std::vector<std::vector<double>> A(sshape.size(), std::vector<double>(K, 0.0)), G = A;
  std::vector<std::vector<double>> Bm(vshape.size(), std::vector<double>(K, 0.0)), H = Bm;

  const LimitsConfig& lim = cfg.limits;
  const double h = mesh.h(), area = mesh.face_area();
  std::vector<PointState> ps;
  double sup_ratio = 0.0, inf_rho = std::numeric_limits<double>::infinity();
  double compl_int = 0.0, cdiv2 = 0.0;

  for (std::size_t k = 0; k < K; ++k) {
    const std::vector<double>& rho = snaps[k].rho;
    const Eigen::VectorXd& v = snaps[k].v;
    sim.momentum().sample(rho, v, rho, v, ps);
    for (int c = 0; c < mesh.num_cells(); ++c) {
      sup_ratio = std::max(sup_ratio, rho[c] / cp.threshold(c));
      inf_rho = std::min(inf_rho, rho[c]);
    }

    // Coarse-grained flux: avg(rho) ubar (x) ubar + R per block, i.e. the block mean of rho u (x) u.
    std::vector<double> rho_pts(Q), u_pts(std::size_t(Q) * d);
    for (int q = 0; q < Q; ++q) {
      rho_pts[q] = ps[q].rho_new;
      for (int a = 0; a < d; ++a) u_pts[std::size_t(q) * d + a] = ps[q].u[a];
    }
    const DefectEstimate def = estimate_defect(mesh, pts, rho_pts, u_pts, lim.block, lim.d_lower, lim.d_upper);
    const BlockMoments M = block_moments(mesh, pts, rho_pts, u_pts, lim.block);
    std::vector<std::array<double, 4>> flux(M.w.size(), {0.0, 0.0, 0.0, 0.0});
    for (std::size_t b = 0; b < M.w.size(); ++b) {
      const double W = M.w[b], rbar = M.m0[b] / W;
      if (!(rbar > 0.0)) continue;
      for (int a = 0; a < d; ++a)
        for (int c = 0; c < d; ++c)
          flux[b][a * 2 + c] = (M.m1[b][a] / W) * (M.m1[b][c] / W) / rbar + def.reynolds[b][a * 2 + c];
    }
    if (k + 1 == K) out.defect_final_trace = def.integral_trace;

    for (int q = 0; q < Q; ++q) {
      const QuadPoint& qp = pts[q];
      const PointState& p = ps[q];
      for (std::size_t j = 0; j < sshape.size(); ++j) {
        A[j][k] += qp.weight * p.rho_new * sshape[j].value(d, false, qp.x);
        const Vec2 g = sshape[j].grad(d, false, qp.x);
        double ug = 0.0;
        for (int a = 0; a < d; ++a) ug += p.u[a] * g[a];
        G[j][k] += qp.weight * p.rho_new * ug;
      }
      if (!interior_cell(mesh, qp.cell)) continue;  // the momentum tests vanish there
      const double pi = cp.pressure(p.rho_new, qp.cell);
      const int b = block_of(mesh, qp.cell, lim.block);
      for (std::size_t j = 0; j < vshape.size(); ++j) {
        const int a = vshape[j].component;
        const double psi = vshape[j].value(d, true, qp.x);
        const Vec2 g = vshape[j].grad(d, true, qp.x);
        Bm[j][k] += qp.weight * p.rho_new * p.u[a] * psi;
        double conv = 0.0, visc = 0.0, epsr = 0.0;
        for (int c = 0; c < d; ++c) {
          conv += flux[b][a * 2 + c] * g[c];
          visc += p.S(a, c) * g[c];
          epsr += p.grad_rho[c] * p.grad_u[a * 2 + c];
        }
        H[j][k] += qp.weight * (conv + pi * g[a] - visc - eps * epsr * psi);
      }
    }
    // boundary exchange and the interior diffusion term of the continuity clause
    for (const BoundaryFace& f : mesh.boundary_faces()) {
      const double r = f.inflow ? bd.rhoB : rho[f.cell];
      for (std::size_t j = 0; j < sshape.size(); ++j) G[j][k] -= sshape[j].value(d, false, f.center) * r * f.flux;
    }
    for (const InteriorFace& f : mesh.interior_faces()) {
      const double jump = area / h * (rho[f.right] - rho[f.left]);
      const Vec2 xl = mesh.center(f.left), xr = mesh.center(f.right);
      for (std::size_t j = 0; j < sshape.size(); ++j)
        G[j][k] -= eps * jump * (sshape[j].value(d, false, xr) - sshape[j].value(d, false, xl));
    }

    if (k > 0) {
      const CongestionReport cr = congestion_diagnostics(mesh, rho, sim.divergence(v), cp, cfg.scheme.tau_c);
      compl_int += dt[k - 1] * cr.complementarity;
      cdiv2 += dt[k - 1] * cr.congested_divergence * cr.congested_divergence;
    }
  }

  for (std::size_t i = 0; i < bank.scalar.size(); ++i) {
    const TestFunction& f = bank.scalar[i];
    const std::size_t j = shape_index(sshape, f);
    const double r = std::abs(weak_residual([&](double x) { return std::pow(x, f.power); }, s, dt, A[j], G[j]));
    if (out.continuity_worst < 0 || r > out.continuity_residual) {
      out.continuity_residual = r;
      out.continuity_worst = static_cast<int>(i);
    }
  }
  for (std::size_t i = 0; i < bank.vector.size(); ++i) {
    const TestFunction& f = bank.vector[i];
    const std::size_t j = shape_index(vshape, f);
    const double r = std::abs(
        weak_residual([&](double x) { return std::pow(x, f.power); }, s, dt, Bm[j], H[j]));
    if (out.momentum_worst < 0 || r > out.momentum_residual) {
      out.momentum_residual = r;
      out.momentum_worst = static_cast<int>(i);
    }
  }

  // Energy clause: the discrete inequality of the run, with the coarse kinetic energy at T
  // (fine kinetic minus the kinetic defect) and tr R / d_upper added on the left.
  double cumulative = 0.0;
  for (const EnergyLedger& L : rec.energy) cumulative += L.residual_dual;
  const DefectEstimate fin = estimate_defect(sim, snaps.back().rho, snaps.back().v);
  out.energy_margin = -cumulative + fin.integral_kinetic - fin.integral_trace / lim.d_upper;
  out.complementarity = compl_int;
  out.congested_divergence = std::sqrt(cdiv2);
  out.sup_ratio = sup_ratio;
  out.inf_rho = inf_rho;

  out.continuity_pass = out.continuity_residual <= lim.residual_tol;
  out.momentum_pass = out.momentum_residual <= lim.residual_tol;
  out.energy_pass = std::isfinite(out.energy_margin) &&
                    out.energy_margin >= -cfg.scheme.energy_tol * (1.0 + rec.initial_energy);
  out.complementarity_pass = out.complementarity <= lim.residual_tol;
  out.congested_divergence_pass = out.congested_divergence <= lim.div_tol;
  out.bounds_ok = inf_rho >= 0.0 && sup_ratio <= 1.0 + cfg.scheme.tau_c;
  return out;
}

LemmaVerdict lemma_equivalence_check(const Mesh& mesh, const std::vector<double>& rho0,
                                     const std::vector<LemmaSlice>& slices, const CongestionPressure& cp,
                                     double tau_c, double div_tol) {
  LemmaVerdict v;
  v.div_tol = div_tol;
  v.rho_tol = tau_c;
  v.rho0_min = v.rho_min = std::numeric_limits<double>::infinity();
  v.rho0_max = v.rho_max = 0.0;
  for (std::size_t c = 0; c < rho0.size(); ++c) {
    const double r = rho0[c] / cp.threshold(static_cast<int>(c));
    v.rho0_min = std::min(v.rho0_min, r);
    v.rho0_max = std::max(v.rho0_max, r);
  }
  double d2 = 0.0;
  for (const LemmaSlice& s : slices) {
    const CongestionReport r = congestion_diagnostics(mesh, s.rho, s.div, cp, tau_c);
    d2 += s.dt * r.congested_divergence * r.congested_divergence;
    for (std::size_t c = 0; c < s.rho.size(); ++c) {
      const double x = s.rho[c] / cp.threshold(static_cast<int>(c));
      v.rho_min = std::min(v.rho_min, x);
      v.rho_max = std::max(v.rho_max, x);
    }
  }
  if (slices.empty()) v.rho_min = v.rho0_min, v.rho_max = v.rho0_max;
  v.congested_divergence = std::sqrt(d2);
  v.i_holds = v.rho0_min > 0.0 && v.rho0_max <= 1.0 + 1e-12 && v.congested_divergence <= div_tol;
  v.ii_holds = v.rho_min > 0.0 && v.rho_max <= 1.0 + v.rho_tol;
  v.i_implies_ii = !v.i_holds || v.ii_holds;
  v.ii_implies_i = !v.ii_holds || v.i_holds;
  return v;
}

LemmaVerdict lemma_equivalence_check(const Simulation& sim, const RunRecord& rec) {
  std::vector<LemmaSlice> slices;
  for (std::size_t k = 1; k < rec.snapshots.size(); ++k) {
    const Snapshot& s = rec.snapshots[k];
    slices.push_back({s.t - rec.snapshots[k - 1].t, s.rho, sim.divergence(s.v)});
  }
  const std::vector<double>& rho0 = rec.snapshots.empty() ? sim.rho0() : rec.snapshots.front().rho;
  return lemma_equivalence_check(sim.mesh(), rho0, slices, sim.pressure(), sim.config().scheme.tau_c,
                                 sim.config().limits.div_tol);
}

CompatibilityVerdict compatibility_check(const Simulation& sim, const RunRecord& rec,
                                         const DissipativeVerdict& verdict) {
  const LimitsConfig& lim = sim.config().limits;
  CompatibilityVerdict c;
  for (const Snapshot& s : rec.snapshots) {
    c.defect_max = std::max(c.defect_max, estimate_defect(sim, s.rho, s.v).max_trace);
    const CongestionReport r =
        congestion_diagnostics(sim.mesh(), s.rho, sim.divergence(s.v), sim.pressure(), sim.config().scheme.tau_c);
    c.pairing_max = std::max(c.pairing_max, std::abs(r.congested_pairing));
    c.overshoot_max = std::max(c.overshoot_max, r.overshoot_L2);
  }
  for (const EnergyLedger& L : rec.energy)
    c.gap_max = std::max({c.gap_max, L.max_point_gap, -L.min_point_gap});
  c.defect_ok = c.defect_max <= lim.defect_tol;
  c.gap_ok = c.gap_max <= lim.gap_tol;
  c.pairing_ok = c.pairing_max <= lim.pairing_tol;
  c.energy_ok = verdict.energy_pass;
  c.smooth = c.overshoot_max == 0.0 && c.defect_ok;
  if (!c.smooth)
    c.status = "not-in-compatibility-regime";
  else if (c.gap_ok && c.pairing_ok && c.energy_ok)
    c.status = "classical-compatible";
  else
    c.status = "incompatible";
  return c;
}

LimitsReport evaluate_limits(const Simulation& sim, const RunRecord& rec) {
  LimitsReport r;
  r.min_defect = std::numeric_limits<double>::infinity();
  for (const Snapshot& s : rec.snapshots) {
    const DefectEstimate e = estimate_defect(sim, s.rho, s.v);
    r.min_defect = std::min(r.min_defect, e.min_trace);
    r.max_defect = std::max(r.max_defect, e.max_trace);
  }
  if (rec.snapshots.empty()) r.min_defect = 0.0;
  if (!rec.snapshots.empty()) r.defect = estimate_defect(sim, rec.snapshots.back().rho, rec.snapshots.back().v);
  r.dissipative = dissipative_verdict(sim, rec, make_test_bank(sim.mesh().dim(), sim.mesh().h()));
  r.lemma = lemma_equivalence_check(sim, rec);
  r.compatibility = compatibility_check(sim, rec, r.dissipative);
  return r;
}

std::vector<RunConfig> sweep_grid(const RunConfig& base) {
  std::vector<RunConfig> grid{base};
  for (const auto& [axis, values] : base.sweep.axes) {
    std::vector<RunConfig> next;
    for (const RunConfig& g : grid)
      for (double x : values) {
        RunConfig c = g;
        if (axis == "alpha") {
          c.congestion.alpha = x;
          c.congestion.ladder.clear();
        } else if (axis == "delta") {
          c.delta = x;
        } else if (axis == "eps") {
          c.scheme.eps = x;
        } else if (axis == "dt") {
          c.scheme.dt = x;
        } else if (axis == "n" || axis == "resolution") {
          if (x != std::floor(x)) throw ConfigError("sweep: axis " + axis + " needs integer values");
          (axis == "n" ? c.scheme.modes : c.scheme.resolution) = static_cast<int>(x);
        } else {
          throw ConfigError("sweep: unknown axis " + axis);
        }
        next.push_back(std::move(c));
      }
    grid = std::move(next);
  }
  return grid;
}

RateFit fit_loglog(const std::string& axis, const std::string& quantity, const std::vector<double>& x,
                   const std::vector<double>& y) {
  RateFit f;
  f.axis = axis;
  f.quantity = quantity;
  f.x = x;
  f.y = y;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  f.points = static_cast<int>(lx.size());
  if (lx.size() < 2) {
    f.slope = f.intercept = f.r2 = std::numeric_limits<double>::quiet_NaN();
    return f;
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) {
    f.slope = f.intercept = f.r2 = std::numeric_limits<double>::quiet_NaN();
    return f;
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

namespace {

SweepPoint run_point(const RunConfig& cfg, ExecPolicy policy) {
  SweepPoint p;
  p.alpha = cfg.congestion.alpha;
  p.delta = cfg.delta;
  p.eps = cfg.scheme.eps;
  p.dt = cfg.scheme.dt;
  p.n = cfg.scheme.modes;
  p.resolution = cfg.scheme.resolution;
  try {
    RunConfig c = cfg;
    c.scheme.snapshot_every = 0;
    Simulation sim(c, policy);
    const RunRecord rec = sim.run();
    p.ok = true;
    p.terminal_v = rec.snapshots.back().v;
    p.terminal_v_norm = p.terminal_v.norm();
    p.terminal_kinetic = rec.energy.empty() ? 0.0 : rec.energy.back().kinetic;
    p.energy_margin = rec.energy_verdict.margin;
    p.max_energy_residual = rec.energy_verdict.max_residual;
    p.overshoot_L2_max = rec.overshoot_L2_max;
    p.complementarity_integral = rec.complementarity_integral;
    p.congested_divergence_L2t = rec.congested_divergence_L2t;
    p.max_closure = rec.max_closure;
    p.mass_drift = rec.continuity.empty() ? 0.0 : rec.continuity.back().drift;
    p.sup_rho = rec.sup_rho;
    p.steps = rec.steps;
    p.max_iterations = rec.max_iterations;
  } catch (const Error& e) {
    p.error = e.what();
    p.exit_kind = e.kind() == FailureKind::kConfig ? 2 : e.kind() == FailureKind::kAssertion ? 3 : 4;
  } catch (const std::exception& e) {
    p.error = e.what();
    p.exit_kind = 4;
  }
  return p;
}

double coefficient_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index n = std::max(a.size(), b.size());
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = (i < a.size() ? a[i] : 0.0) - (i < b.size() ? b[i] : 0.0);
    s += x * x;
  }
  return std::sqrt(s);
}

}  // namespace

SweepReport run_sweep(const RunConfig& base, int workers) {
  for (const auto& [axis, values] : base.sweep.axes)
    if (values.size() < 2) throw ConfigError("sweep: axis " + axis + " needs at least 2 values");
  const std::vector<RunConfig> grid = sweep_grid(base);
  SweepReport rep;
  rep.axes = base.sweep.axes;
  rep.workers = std::max(1, std::min<int>(workers, static_cast<int>(grid.size())));
  rep.points.resize(grid.size());
  // serial kernels for every worker count, so the points do not depend on --workers
  const ExecPolicy policy = ExecPolicy::kSerial;
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < grid.size(); i = next++) rep.points[i] = run_point(grid[i], policy);
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < rep.workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();

  // Points along one axis with every other axis at its first value.
  std::vector<std::size_t> stride(rep.axes.size(), 1);
  for (std::size_t a = rep.axes.size(); a-- > 1;) stride[a - 1] = stride[a] * rep.axes[a].second.size();
  for (std::size_t a = 0; a < rep.axes.size(); ++a) {
    const std::string& axis = rep.axes[a].first;
    const std::vector<double>& xs = rep.axes[a].second;
    std::vector<const SweepPoint*> line;
    for (std::size_t i = 0; i < xs.size(); ++i) line.push_back(&rep.points[i * stride[a]]);
    const bool refine_up = axis == "n" || axis == "resolution" || axis == "alpha";
    const SweepPoint& ref = refine_up ? *line.back() : *line.front();
    std::vector<double> x, drift;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == &ref) continue;
      x.push_back(xs[i]);
      drift.push_back(line[i]->ok && ref.ok ? coefficient_distance(line[i]->terminal_v, ref.terminal_v)
                                            : std::numeric_limits<double>::quiet_NaN());
    }
    if (axis == "alpha") {
      std::vector<double> y;
      for (const SweepPoint* p : line) y.push_back(p->ok ? p->overshoot_L2_max : std::numeric_limits<double>::quiet_NaN());
      rep.fits.push_back(fit_loglog(axis, "overshoot_L2_max", xs, y));
    } else if (axis == "delta") {
      std::vector<double> y;
      for (const SweepPoint* p : line)
        y.push_back(p->ok ? std::abs(p->energy_margin) : std::numeric_limits<double>::quiet_NaN());
      rep.fits.push_back(fit_loglog(axis, "energy_margin", xs, y));
      rep.fits.push_back(fit_loglog(axis, "terminal_drift", x, drift));
    } else if (axis == "n") {
      std::vector<double> y;
      for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == &ref) continue;
        y.push_back(line[i]->ok && ref.ok ? std::abs(line[i]->terminal_kinetic - ref.terminal_kinetic)
                                          : std::numeric_limits<double>::quiet_NaN());
      }
      rep.fits.push_back(fit_loglog(axis, "kinetic_gap", x, y));
    } else {
      rep.fits.push_back(fit_loglog(axis, "terminal_drift", x, drift));
    }
  }
  return rep;
}

}  // namespace congesta
