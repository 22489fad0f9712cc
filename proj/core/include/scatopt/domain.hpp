#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "scatopt/errors.hpp"

namespace scatopt {

/// Air background plus an effective "sound hard" solid with a large
/// impedance contrast. kappa = rho * c^2.
struct MaterialModel {
  double rho_air = 1.204;    // kg/m^3
  double c_air = 343.0;      // m/s
  double rho_solid = 1204.0; // 1e3 x air by default
  // Default c_solid gives kappa_solid = 1e4 x kappa_air.
  double c_solid = 343.0 * 3.1622776601683795;

  double kappa_air() const { return rho_air * c_air * c_air; }
  double kappa_solid() const { return rho_solid * c_solid * c_solid; }

  void validate() const;
};

struct ArcSample {
  int cell = 0;            // grid cell index holding this sample
  double theta_deg = 0.0;  // angle from the +x axis, seen from the source
};

struct DomainConfig {
  double width_m = 0.0;   // interior (non-PML) extent
  double height_m = 0.0;
  double source_x_m = 0.0;  // measured from the interior lower-left corner
  double source_y_m = 0.0;
  double design_size_m = 0.0;      // square design region centered on source
  double source_clearance_m = 0.0; // air disk kept free around the source; 0 -> 4h
  double f_max_hz = 0.0;
  double resolution_ppw = 10.0;    // cells per wavelength at f_max
  double target_radius_m = 0.0;
  double target_span_deg = 180.0;
  int target_samples = 0;          // 0 -> one sample per degree (span+1)
  int pml_cells = 20;
  MaterialModel material;
};

/// Uniform Cartesian grid with PML frames on all four sides.
/// Cell (i, j) has its center at ((i - pml + 0.5) h, (j - pml + 0.5) h)
/// relative to the interior lower-left corner.
struct SimulationDomain {
  int nx = 0, ny = 0;
  double h = 0.0;
  int pml_cells = 0;
  double f_max_hz = 0.0;
  double resolution_ppw = 0.0;
  MaterialModel material;

  std::vector<std::uint8_t> design_mask;  // per cell
  std::vector<int> design_cells;          // raster-ordered cells of the mask
  std::vector<ArcSample> target_arc;
  double target_radius_m = 0.0;
  double design_size_m = 0.0;

  int source_i = 0, source_j = 0;

  int idx(int i, int j) const { return j * nx + i; }
  int cells() const { return nx * ny; }
  double cell_x(int i) const { return (i - pml_cells + 0.5) * h; }
  double cell_y(int j) const { return (j - pml_cells + 0.5) * h; }
  bool in_pml(int i, int j) const {
    return i < pml_cells || i >= nx - pml_cells || j < pml_cells ||
           j >= ny - pml_cells;
  }
  double arc_dtheta_deg() const;
  /// Arc-length weight of one arc sample, in meters.
  double arc_ds() const;
};

SimulationDomain build_domain(const DomainConfig& config);

/// Raw design variables on the full grid; zero outside the design mask.
struct DensityField {
  int nx = 0, ny = 0;
  Eigen::VectorXd xi;

  static DensityField uniform(const SimulationDomain& dom, double value);
  static DensityField zeros(const SimulationDomain& dom);
};

/// Per-cell 1/rho and 1/kappa entering the Helmholtz operator.
struct CoefficientFields {
  Eigen::VectorXd inv_rho;
  Eigen::VectorXd inv_kappa;
};

/// Linear interpolation of the inverse coefficients between air (xi = 0)
/// and solid (xi = 1).
CoefficientFields interpolate_material(const DensityField& xi_projected,
                                       const SimulationDomain& dom);

/// d(1/rho)/dxi and d(1/kappa)/dxi; constant for the linear scheme.
struct MaterialDerivatives {
  double d_inv_rho = 0.0;
  double d_inv_kappa = 0.0;
};
MaterialDerivatives material_derivatives(const MaterialModel& m);

/// Normalized linear-cone density filter over the design mask.
class DensityFilter {
 public:
  DensityFilter(const SimulationDomain& dom, double radius_m);

  DensityField apply(const DensityField& xi) const;
  /// Transpose map used for chaining sensitivities back to raw densities.
  DensityField apply_transpose(const DensityField& sens) const;

  double radius_m() const { return radius_m_; }

 private:
  int nx_ = 0, ny_ = 0;
  double radius_m_ = 0.0;
  std::vector<int> cells_;                 // design cells, raster order
  std::vector<int> cell_slot_;             // full grid -> slot in cells_, or -1
  struct Offset {
    int di, dj;
    double w;  // cone weight 1 - d/R
  };
  std::vector<Offset> offsets_;
  std::vector<double> norm_;               // per design cell: sum of weights
};

/// Smoothed-Heaviside threshold projection.
double project_value(double v, double beta, double eta);
double project_derivative(double v, double beta, double eta);
DensityField apply_projection(const DensityField& xi_f, double beta, double eta);

}  // namespace scatopt
