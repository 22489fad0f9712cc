#include "scatopt/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scatopt {

namespace {
constexpr double kPi = 3.14159265358979323846;

int iround(double v) { return static_cast<int>(std::llround(v)); }
}  // namespace

void MaterialModel::validate() const {
  if (rho_air <= 0 || c_air <= 0 || rho_solid <= 0 || c_solid <= 0) {
    throw ConfigError("material: all parameters must be positive");
  }
  if (rho_solid / rho_air < 1e3) {
    std::ostringstream os;
    os << "material: rho_solid/rho_air = " << rho_solid / rho_air
       << " violates the sound-hard requirement (>= 1e3)";
    throw ConfigError(os.str());
  }
}

double SimulationDomain::arc_dtheta_deg() const {
  if (target_arc.size() < 2) return 0.0;
  return target_arc[1].theta_deg - target_arc[0].theta_deg;
}

double SimulationDomain::arc_ds() const {
  return target_radius_m * arc_dtheta_deg() * kPi / 180.0;
}

SimulationDomain build_domain(const DomainConfig& config) {
  config.material.validate();
  if (config.f_max_hz <= 0) throw ConfigError("domain: f_max_hz must be positive");
  if (config.resolution_ppw < 10.0) {
    std::ostringstream os;
    os << "domain: resolution " << config.resolution_ppw
       << " cells per wavelength at " << config.f_max_hz
       << " Hz is below the required 10";
    throw ConfigError(os.str());
  }
  if (config.width_m <= 0 || config.height_m <= 0) {
    throw ConfigError("domain: size_m entries must be positive");
  }
  if (config.pml_cells < 0) throw ConfigError("domain: pml_cells must be >= 0");

  SimulationDomain dom;
  dom.material = config.material;
  dom.f_max_hz = config.f_max_hz;
  dom.resolution_ppw = config.resolution_ppw;
  dom.pml_cells = config.pml_cells;
  dom.h = config.material.c_air / (config.f_max_hz * config.resolution_ppw);
  dom.design_size_m = config.design_size_m;
  dom.target_radius_m = config.target_radius_m;

  const double h = dom.h;
  const int nix = std::max(1, iround(config.width_m / h));
  const int niy = std::max(1, iround(config.height_m / h));
  dom.nx = nix + 2 * config.pml_cells;
  dom.ny = niy + 2 * config.pml_cells;

  dom.source_i = config.pml_cells + iround(config.source_x_m / h - 0.5);
  dom.source_j = config.pml_cells + iround(config.source_y_m / h - 0.5);
  if (dom.in_pml(dom.source_i, dom.source_j)) {
    throw ConfigError("domain: source position lies inside the PML");
  }

  const double sx = dom.cell_x(dom.source_i);
  const double sy = dom.cell_y(dom.source_j);

  dom.design_mask.assign(static_cast<size_t>(dom.cells()), 0);
  if (config.design_size_m > 0) {
    const double half = config.design_size_m / 2.0;
    const double half_diag = half * std::sqrt(2.0);
    if (config.target_radius_m < 2.0 * half_diag) {
      std::ostringstream os;
      os << "domain: target_radius_m = " << config.target_radius_m
         << " must be at least twice the design half-diagonal ("
         << 2.0 * half_diag << " m)";
      throw ConfigError(os.str());
    }
    double clearance = config.source_clearance_m > 0 ? config.source_clearance_m
                                                     : 4.0 * h;
    for (int j = 0; j < dom.ny; ++j) {
      for (int i = 0; i < dom.nx; ++i) {
        const double x = dom.cell_x(i), y = dom.cell_y(j);
        if (std::abs(x - sx) > half || std::abs(y - sy) > half) continue;
        if (dom.in_pml(i, j)) {
          throw ConfigError(
              "domain: design region overlaps the PML; enlarge size_m or move "
              "the source");
        }
        if (std::hypot(x - sx, y - sy) < clearance) continue;
        dom.design_mask[static_cast<size_t>(dom.idx(i, j))] = 1;
      }
    }
  }
  dom.design_cells.clear();
  for (int c = 0; c < dom.cells(); ++c) {
    if (dom.design_mask[static_cast<size_t>(c)]) dom.design_cells.push_back(c);
  }

  // Target arc, uniform in theta over the configured span.
  if (config.target_radius_m > 0) {
    int n = config.target_samples > 0
                ? config.target_samples
                : iround(config.target_span_deg) + 1;
    if (n < 2) throw ConfigError("domain: target_samples must be >= 2");
    const double span = config.target_span_deg;
    const double r_cells = config.target_radius_m / h;
    for (int s = 0; s < n; ++s) {
      const double th = -span / 2.0 + span * s / (n - 1);
      const double rad = th * kPi / 180.0;
      const int i = dom.source_i + iround(r_cells * std::cos(rad));
      const int j = dom.source_j + iround(r_cells * std::sin(rad));
      if (i < 0 || i >= dom.nx || j < 0 || j >= dom.ny || dom.in_pml(i, j)) {
        std::ostringstream os;
        os << "domain: target arc sample at " << th
           << " deg falls outside the interior region; the arc must lie "
              "strictly between design region and PML";
        throw ConfigError(os.str());
      }
      if (dom.design_mask[static_cast<size_t>(dom.idx(i, j))]) {
        std::ostringstream os;
        os << "domain: target arc sample at " << th
           << " deg intersects the design region";
        throw ConfigError(os.str());
      }
      dom.target_arc.push_back({dom.idx(i, j), th});
    }
  }
  return dom;
}

DensityField DensityField::uniform(const SimulationDomain& dom, double value) {
  DensityField f;
  f.nx = dom.nx;
  f.ny = dom.ny;
  f.xi = Eigen::VectorXd::Zero(dom.cells());
  for (int c : dom.design_cells) f.xi[c] = value;
  return f;
}

DensityField DensityField::zeros(const SimulationDomain& dom) {
  return uniform(dom, 0.0);
}

CoefficientFields interpolate_material(const DensityField& xi_projected,
                                       const SimulationDomain& dom) {
  const MaterialModel& m = dom.material;
  const double ir_a = 1.0 / m.rho_air, ir_s = 1.0 / m.rho_solid;
  const double ik_a = 1.0 / m.kappa_air(), ik_s = 1.0 / m.kappa_solid();
  CoefficientFields cf;
  cf.inv_rho = Eigen::VectorXd::Constant(dom.cells(), ir_a);
  cf.inv_kappa = Eigen::VectorXd::Constant(dom.cells(), ik_a);
  for (int c : dom.design_cells) {
    const double xi = xi_projected.xi[c];
    cf.inv_rho[c] = (1.0 - xi) * ir_a + xi * ir_s;
    cf.inv_kappa[c] = (1.0 - xi) * ik_a + xi * ik_s;
  }
  return cf;
}

MaterialDerivatives material_derivatives(const MaterialModel& m) {
  MaterialDerivatives d;
  d.d_inv_rho = 1.0 / m.rho_solid - 1.0 / m.rho_air;
  d.d_inv_kappa = 1.0 / m.kappa_solid() - 1.0 / m.kappa_air();
  return d;
}

DensityFilter::DensityFilter(const SimulationDomain& dom, double radius_m)
    : nx_(dom.nx), ny_(dom.ny), radius_m_(radius_m), cells_(dom.design_cells) {
  if (radius_m < dom.h) {
    std::ostringstream os;
    os << "filter: radius " << radius_m << " m is below the grid spacing "
       << dom.h << " m";
    throw ConfigError(os.str());
  }
  const int reach = static_cast<int>(std::floor(radius_m / dom.h));
  for (int dj = -reach; dj <= reach; ++dj) {
    for (int di = -reach; di <= reach; ++di) {
      const double d = std::hypot(di * dom.h, dj * dom.h);
      if (d >= radius_m) continue;
      offsets_.push_back({di, dj, 1.0 - d / radius_m});
    }
  }
  cell_slot_.assign(static_cast<size_t>(dom.cells()), -1);
  for (size_t s = 0; s < cells_.size(); ++s) cell_slot_[cells_[s]] = (int)s;
  norm_.resize(cells_.size());
  for (size_t s = 0; s < cells_.size(); ++s) {
    const int c = cells_[s];
    const int i = c % nx_, j = c / nx_;
    double w = 0.0;
    for (const auto& o : offsets_) {
      const int ii = i + o.di, jj = j + o.dj;
      if (ii < 0 || ii >= nx_ || jj < 0 || jj >= ny_) continue;
      if (cell_slot_[jj * nx_ + ii] < 0) continue;
      w += o.w;
    }
    norm_[s] = w;
  }
}

DensityField DensityFilter::apply(const DensityField& xi) const {
  DensityField out;
  out.nx = nx_;
  out.ny = ny_;
  out.xi = Eigen::VectorXd::Zero(xi.xi.size());
  for (size_t s = 0; s < cells_.size(); ++s) {
    const int c = cells_[s];
    const int i = c % nx_, j = c / nx_;
    double acc = 0.0;
    for (const auto& o : offsets_) {
      const int ii = i + o.di, jj = j + o.dj;
      if (ii < 0 || ii >= nx_ || jj < 0 || jj >= ny_) continue;
      const int cc = jj * nx_ + ii;
      if (cell_slot_[cc] < 0) continue;
      acc += o.w * xi.xi[cc];
    }
    out.xi[c] = acc / norm_[s];
  }
  return out;
}

DensityField DensityFilter::apply_transpose(const DensityField& sens) const {
  DensityField out;
  out.nx = nx_;
  out.ny = ny_;
  out.xi = Eigen::VectorXd::Zero(sens.xi.size());
  for (size_t s = 0; s < cells_.size(); ++s) {
    const int c = cells_[s];
    const int i = c % nx_, j = c / nx_;
    const double v = sens.xi[c] / norm_[s];
    for (const auto& o : offsets_) {
      const int ii = i + o.di, jj = j + o.dj;
      if (ii < 0 || ii >= nx_ || jj < 0 || jj >= ny_) continue;
      const int cc = jj * nx_ + ii;
      if (cell_slot_[cc] < 0) continue;
      out.xi[cc] += o.w * v;
    }
  }
  return out;
}

double project_value(double v, double beta, double eta) {
  const double denom = std::tanh(beta * eta) + std::tanh(beta * (1.0 - eta));
  return (std::tanh(beta * eta) + std::tanh(beta * (v - eta))) / denom;
}

double project_derivative(double v, double beta, double eta) {
  const double denom = std::tanh(beta * eta) + std::tanh(beta * (1.0 - eta));
  const double t = std::tanh(beta * (v - eta));
  return beta * (1.0 - t * t) / denom;
}

DensityField apply_projection(const DensityField& xi_f, double beta,
                              double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw ConfigError("projection: eta must lie in (0,1)");
  }
  if (beta < 1.0) throw ConfigError("projection: beta must be >= 1");
  DensityField out = xi_f;
  for (Eigen::Index c = 0; c < out.xi.size(); ++c) {
    out.xi[c] = project_value(xi_f.xi[c], beta, eta);
  }
  return out;
}

}  // namespace scatopt
