#include "congesta/domain.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <utility>

namespace congesta {

BoundarySpec BoundarySpec::endpoints(double left, double right, double rhoB) {
  BoundarySpec bs;
  bs.dim = 1;
  bs.U0 = {left, 0.0};
  bs.A = {right - left, 0.0, 0.0, 0.0};
  bs.rhoB = rhoB;
  return bs;
}

Vec2 BoundarySpec::velocity(const Vec2& x) const {
  Vec2 u{U0[0] + A[0] * x[0] + A[1] * x[1], U0[1] + A[2] * x[0] + A[3] * x[1]};
  if (dim == 1) u[1] = 0.0;
  return u;
}

double BoundarySpec::divergence() const { return dim == 1 ? A[0] : A[0] + A[3]; }

Vec2 Mesh::center(int c) const {
  Vec2 x{(ix(c) + 0.5) * h_, 0.0};
  if (dim_ == 2) x[1] = (iy(c) + 0.5) * h_;
  return x;
}

bool Mesh::has_inflow() const {
  return std::any_of(boundary_.begin(), boundary_.end(), [](const BoundaryFace& f) { return f.inflow; });
}

double Mesh::boundary_flux() const {
  double s = 0.0;
  for (const auto& f : boundary_) s += f.flux;
  return s;
}

Mesh build_mesh(int dim, int resolution, const BoundarySpec& bs) {
  if (dim != 1 && dim != 2) throw InvalidBoundarySpec("domain: dim must be 1 or 2");
  if (bs.dim != dim) throw InvalidBoundarySpec("domain: boundary data dimension does not match the mesh");
  if (resolution < 4) throw InvalidBoundarySpec("domain: resolution must be >= 4");
  Mesh m;
  m.dim_ = dim;
  m.n_ = resolution;
  m.h_ = 1.0 / resolution;
  m.ncells_ = dim == 1 ? resolution : resolution * resolution;
  m.vol_ = dim == 1 ? m.h_ : m.h_ * m.h_;
  m.area_ = dim == 1 ? 1.0 : m.h_;
  const int n = resolution, ny = dim == 1 ? 1 : n;
  const double h = m.h_;

  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix + 1 < n; ++ix) {
      const int c = ix + n * iy;
      m.interior_.push_back({c, c + 1, 0, {(ix + 1) * h, dim == 2 ? (iy + 0.5) * h : 0.0}});
    }
  }
  if (dim == 2) {
    for (int iy = 0; iy + 1 < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const int c = ix + n * iy;
        m.interior_.push_back({c, c + n, 1, {(ix + 0.5) * h, (iy + 1) * h}});
      }
  }

  // The field is affine, so the midpoint rule gives the exact face flux.
  auto add_face = [&](int cell, int axis, int side, Vec2 center) {
    BoundaryFace f;
    f.cell = cell;
    f.axis = axis;
    f.side = side;
    f.normal = side == 0 ? -1.0 : 1.0;
    f.center = center;
    f.flux = bs.velocity(center)[axis] * f.normal * m.area_;
    f.inflow = f.flux < 0.0;
    m.boundary_.push_back(f);
  };
  if (dim == 1) {
    add_face(0, 0, 0, {0.0, 0.0});
    add_face(n - 1, 0, 1, {1.0, 0.0});
  } else {
    for (int iy = 0; iy < n; ++iy) {
      add_face(n * iy, 0, 0, {0.0, (iy + 0.5) * h});
      add_face(n - 1 + n * iy, 0, 1, {1.0, (iy + 0.5) * h});
    }
    for (int ix = 0; ix < n; ++ix) {
      add_face(ix, 1, 0, {(ix + 0.5) * h, 0.0});
      add_face(ix + n * (n - 1), 1, 1, {(ix + 0.5) * h, 1.0});
    }
  }
  return m;
}

BoundaryData extend_uB(const Mesh& mesh, const BoundarySpec& bs) {
  BoundaryData bd;
  bd.spec = bs;
  bd.div = bs.divergence();
  bd.total_flux = mesh.boundary_flux();
  bd.rhoB = bs.rhoB;
  // Flux through the box equals the (constant) divergence; compare with a relative guard.
  if (bd.div < -1e-12 || bd.total_flux < -1e-12)
    throw NegativeFlux("boundary: net outward flux of uB is negative (" + std::to_string(bd.total_flux) + ")");
  if (mesh.has_inflow() && !(bs.rhoB > 0.0 && bs.rhoB <= 1.0))
    throw InvalidBoundarySpec("boundary: rhoB must lie in (0, 1] on the inflow boundary");
  // |uB| is convex, so its sup over the box is attained at a corner.
  const int corners = mesh.dim() == 1 ? 2 : 4;
  for (int k = 0; k < corners; ++k) {
    Vec2 x{double(k & 1), double((k >> 1) & 1)};
    Vec2 u = bs.velocity(x);
    bd.sup_norm = std::max(bd.sup_norm, std::hypot(u[0], u[1]));
  }
  return bd;
}

InitialData validate_initial(InitialData data) {
  const std::size_t nc = data.rho0.size();
  if (nc == 0) throw ConfigError("initial: empty density");
  if (data.m0.size() != nc * data.dim) throw ConfigError("initial: momentum has the wrong number of entries");
  double sum = 0.0;
  for (std::size_t c = 0; c < nc; ++c) {
    const double r = data.rho0[c];
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("initial: density must lie in [0, 1]");
    sum += r;
  }
  data.M = sum / nc;
  if (data.M >= 1.0) throw MassExceedsOne("initial: mean density " + std::to_string(data.M) + " must be < 1");
  data.u0.assign(nc * data.dim, 0.0);
  for (std::size_t c = 0; c < nc; ++c) {
    for (int a = 0; a < data.dim; ++a) {
      const double m = data.m0[c * data.dim + a];
      if (data.rho0[c] == 0.0) {
        if (m != 0.0) throw MomentumOnVacuum("initial: nonzero momentum on a vacuum cell " + std::to_string(c));
      } else {
        data.u0[c * data.dim + a] = m / data.rho0[c];
      }
    }
  }
  return data;
}

std::vector<double> read_cell_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open cell value file '" + path + "'");
  std::vector<double> out;
  std::string line;
  int lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    // an optional header row of names
    if (std::exchange(first, false) && std::isalpha(static_cast<unsigned char>(line[0]))) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
      try {
        std::size_t used = 0;
        out.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": not a number: '" + tok + "'");
      }
    }
  }
  return out;
}

InitialData make_initial(const Mesh& mesh, const BoundaryData& bd, const InitialSpec& spec) {
  const int nc = mesh.num_cells(), d = mesh.dim();
  const double pi = std::numbers::pi;
  InitialData data;
  data.dim = d;
  data.rho0.resize(nc);
  if (spec.rho_profile == "uniform") {
    std::fill(data.rho0.begin(), data.rho0.end(), spec.rho_mean);
  } else if (spec.rho_profile == "cosine") {
    for (int c = 0; c < nc; ++c) {
      Vec2 x = mesh.center(c);
      double shape = std::cos(spec.rho_mode * pi * x[0]);
      if (d == 2) shape *= std::cos(spec.rho_mode * pi * x[1]);
      data.rho0[c] = spec.rho_mean + spec.rho_amp * shape;
    }
  } else if (spec.rho_profile == "noise") {
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int c = 0; c < nc; ++c) data.rho0[c] = spec.rho_mean + spec.rho_amp * u(rng);
  } else if (spec.rho_profile == "file") {
    data.rho0 = read_cell_values(spec.rho_file);
    if (static_cast<int>(data.rho0.size()) != nc)
      throw ConfigError("initial: density file has " + std::to_string(data.rho0.size()) + " values, mesh has " +
                        std::to_string(nc) + " cells");
  } else {
    throw ConfigError("initial: unknown density profile '" + spec.rho_profile + "'");
  }

  std::vector<double> u(nc * d, 0.0);
  if (spec.velocity_profile == "file") {
    u = read_cell_values(spec.u_file);
    if (static_cast<int>(u.size()) != nc * d) throw ConfigError("initial: velocity file has the wrong number of values");
  } else if (spec.velocity_profile == "boundary" || spec.velocity_profile == "sine") {
    for (int c = 0; c < nc; ++c) {
      Vec2 x = mesh.center(c);
      Vec2 ub = bd.velocity(x);
      for (int a = 0; a < d; ++a) u[c * d + a] = ub[a];
      if (spec.velocity_profile == "sine") {
        double shape = std::sin(spec.u_mode * pi * x[0]);
        if (d == 2) shape *= std::sin(spec.u_mode * pi * x[1]);
        u[c * d + std::min(spec.u_component, d - 1)] += spec.u_amp * shape;
      }
    }
  } else {
    throw ConfigError("initial: unknown velocity profile '" + spec.velocity_profile + "'");
  }
  data.m0.resize(nc * d);
  for (int c = 0; c < nc; ++c)
    for (int a = 0; a < d; ++a) data.m0[c * d + a] = data.rho0[c] * u[c * d + a];
  return data;
}

}  // namespace congesta
