#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "congesta/errors.hpp"

namespace congesta {

using Vec2 = std::array<double, 2>;

/// Boundary velocity given as an affine field uB(x) = U0 + A x on the closed box.
/// The same formula serves as the trace on the boundary and as its interior extension.
struct BoundarySpec {
  int dim = 1;
  Vec2 U0{0.0, 0.0};
  std::array<double, 4> A{0.0, 0.0, 0.0, 0.0};  // row-major, A[a*2+b] = d uB_a / d x_b
  double rhoB = 1.0;

  /// 1D trace given by its two endpoint values.
  static BoundarySpec endpoints(double left, double right, double rhoB);

  Vec2 velocity(const Vec2& x) const;
  double divergence() const;
  double grad(int a, int b) const { return A[a * 2 + b]; }
};

struct InteriorFace {
  int left = 0, right = 0;  // right sits at larger coordinate along `axis`
  int axis = 0;
  Vec2 center{0.0, 0.0};
};

struct BoundaryFace {
  int cell = 0;
  int axis = 0;
  int side = 0;          // 0: low end of the axis, 1: high end
  double normal = 0.0;   // outward normal component along axis (-1 or +1)
  Vec2 center{0.0, 0.0};
  double flux = 0.0;     // integral of uB . n over the face
  bool inflow = false;   // member of Gamma_in (flux < 0)
};

/// Uniform grid on (0,1)^d, d in {1,2}. Cell index c = ix + n * iy.
class Mesh {
 public:
  int dim() const { return dim_; }
  int n() const { return n_; }
  int num_cells() const { return ncells_; }
  double h() const { return h_; }
  double cell_volume() const { return vol_; }
  double face_area() const { return area_; }

  int ix(int c) const { return c % n_; }
  int iy(int c) const { return c / n_; }
  Vec2 center(int c) const;

  const std::vector<InteriorFace>& interior_faces() const { return interior_; }
  const std::vector<BoundaryFace>& boundary_faces() const { return boundary_; }
  bool has_inflow() const;
  double boundary_flux() const;

  friend Mesh build_mesh(int dim, int resolution, const BoundarySpec& bs);

 private:
  int dim_ = 1, n_ = 0, ncells_ = 0;
  double h_ = 0.0, vol_ = 0.0, area_ = 1.0;
  std::vector<InteriorFace> interior_;
  std::vector<BoundaryFace> boundary_;
};

/// Builds the grid and partitions boundary faces into Gamma_in / Gamma_out by the
/// sign of the face flux of uB. Zero-flux faces go to Gamma_out.
Mesh build_mesh(int dim, int resolution, const BoundarySpec& bs);

/// Boundary velocity with its interior extension, plus the inflow density.
struct BoundaryData {
  BoundarySpec spec;
  double div = 0.0;         // constant divergence of the extension
  double total_flux = 0.0;  // boundary integral of uB . n
  double rhoB = 1.0;
  double sup_norm = 0.0;    // sup over the closed box of |uB|

  Vec2 velocity(const Vec2& x) const { return spec.velocity(x); }
};

/// Checks the standing assumptions on uB, rhoB and returns the extension.
BoundaryData extend_uB(const Mesh& mesh, const BoundarySpec& bs);

/// Cellwise initial density and momentum. Momentum is stored component-interleaved,
/// m[c * dim + a].
struct InitialData {
  int dim = 1;
  std::vector<double> rho0;
  std::vector<double> m0;
  std::vector<double> u0;  // filled by validate_initial
  double M = 0.0;          // mean density
};

InitialData validate_initial(InitialData data);

/// Named initial profiles.
struct InitialSpec {
  std::string rho_profile = "uniform";  // uniform | cosine | noise | file
  double rho_mean = 0.5;
  double rho_amp = 0.0;
  int rho_mode = 1;
  std::string rho_file;
  std::string velocity_profile = "boundary";  // boundary | sine | file
  double u_amp = 0.0;
  int u_mode = 1;
  int u_component = 0;  // 2D: component carrying the sine perturbation
  std::string u_file;
  std::uint64_t seed = 0;
};

/// Builds (rho0, m0 = rho0 u0) on the mesh from the named profiles. Does not validate.
InitialData make_initial(const Mesh& mesh, const BoundaryData& bd, const InitialSpec& spec);

/// Reads one value per line (or comma separated) from a CSV file, skipping '#' comments.
std::vector<double> read_cell_values(const std::string& path);

}  // namespace congesta
