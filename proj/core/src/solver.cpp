#include "scatopt/solver.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace scatopt {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr Complex kI = Complex(0.0, 1.0);

// Quadratically graded absorption targeting a theoretical round-trip
// reflection of 1e-5 in amplitude.
double sigma_max_for(double c, double pml_len_m) {
  const double r0 = 1e-5;
  return -3.0 * c * std::log(r0) / (2.0 * pml_len_m);
}

double sigma_profile(double u, int pml, int n_cells, double sigma_max) {
  double d = 0.0;
  if (u < pml) d = pml - u;
  else if (u > n_cells - pml) d = u - (n_cells - pml);
  if (d > pml) d = pml;
  const double frac = pml > 0 ? d / pml : 0.0;
  return sigma_max * frac * frac;
}
}  // namespace

AssembledSystem::AssembledSystem(const SimulationDomain& dom,
                                 const CoefficientFields& coeffs,
                                 const SourceSpec& source, double f_hz)
    : dom_(&dom), f_hz_(f_hz) {
  if (f_hz <= 0) throw ConfigError("assemble: frequency must be positive");
  const double ppw = dom.material.c_air / (f_hz * dom.h);
  if (ppw < 10.0 - 1e-9) {
    std::ostringstream os;
    os << "assemble: frequency " << f_hz << " Hz is resolved with only " << ppw
       << " cells per wavelength (minimum 10)";
    throw ConfigError(os.str());
  }
  if (source.i < 0 || source.i >= dom.nx || source.j < 0 ||
      source.j >= dom.ny || dom.in_pml(source.i, source.j)) {
    throw ConfigError("assemble: source must lie inside the interior region");
  }

  if (dom.pml_cells > 0) {
    const double pml_len = dom.pml_cells * dom.h;
    sigma_max_x_ = sigma_max_for(dom.material.c_air, pml_len);
    sigma_max_y_ = sigma_max_x_;
  }

  const int n = dom.cells();
  const double w = omega();
  const double inv_h2 = 1.0 / (dom.h * dom.h);

  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<size_t>(5 * n));
  std::vector<Complex> diag(static_cast<size_t>(n), Complex(0, 0));

  for (int j = 0; j < dom.ny; ++j) {
    const Complex syc = stretch_y(j + 0.5);
    for (int i = 0; i < dom.nx; ++i) {
      const int a = dom.idx(i, j);
      const Complex sxc = stretch_x(i + 0.5);
      diag[static_cast<size_t>(a)] +=
          w * w * coeffs.inv_kappa[a] * sxc * syc;
      if (i + 1 < dom.nx) {
        const int b = dom.idx(i + 1, j);
        const Complex wf = syc / stretch_x(i + 1.0);
        const Complex cf =
            0.5 * (coeffs.inv_rho[a] + coeffs.inv_rho[b]) * wf * inv_h2;
        diag[static_cast<size_t>(a)] -= cf;
        diag[static_cast<size_t>(b)] -= cf;
        trips.emplace_back(a, b, cf);
        trips.emplace_back(b, a, cf);
      }
      if (j + 1 < dom.ny) {
        const int b = dom.idx(i, j + 1);
        const Complex wf = sxc / stretch_y(j + 1.0);
        const Complex cf =
            0.5 * (coeffs.inv_rho[a] + coeffs.inv_rho[b]) * wf * inv_h2;
        diag[static_cast<size_t>(a)] -= cf;
        diag[static_cast<size_t>(b)] -= cf;
        trips.emplace_back(a, b, cf);
        trips.emplace_back(b, a, cf);
      }
    }
  }
  for (int a = 0; a < n; ++a) {
    trips.emplace_back(a, a, diag[static_cast<size_t>(a)]);
  }
  A_.resize(n, n);
  A_.setFromTriplets(trips.begin(), trips.end());
  A_.makeCompressed();

  b_ = VectorXc::Zero(n);
  const int src = dom.idx(source.i, source.j);
  if (std::abs(coeffs.inv_rho[src] * dom.material.rho_air - 1.0) > 1e-9) {
    throw ConfigError("assemble: source cell is not air");
  }
  b_[src] = -source.amplitude * inv_h2;
}

double AssembledSystem::omega() const { return 2.0 * kPi * f_hz_; }

Complex AssembledSystem::stretch_x(double u) const {
  const double sigma =
      sigma_profile(u, dom_->pml_cells, dom_->nx, sigma_max_x_);
  return Complex(1.0, sigma / omega());
}

Complex AssembledSystem::stretch_y(double u) const {
  const double sigma =
      sigma_profile(u, dom_->pml_cells, dom_->ny, sigma_max_y_);
  return Complex(1.0, sigma / omega());
}

Factorization::Factorization(const AssembledSystem& sys)
    : f_hz_(sys.frequency_hz()) {
  lu_.analyzePattern(sys.matrix());
  lu_.factorize(sys.matrix());
  if (lu_.info() != Eigen::Success) {
    std::ostringstream os;
    os << "solver: factorization failed (singular or near-singular system) at "
       << f_hz_ << " Hz";
    throw NumericalError(os.str());
  }
}

VectorXc Factorization::solve(const VectorXc& rhs) const {
  if (rhs.norm() == 0.0) return VectorXc::Zero(rhs.size());
  return lu_.solve(rhs);
}

PressureField solve(const AssembledSystem& sys) {
  Factorization fact(sys);
  return solve(sys, fact);
}

PressureField solve(const AssembledSystem& sys, const Factorization& fact) {
  PressureField out;
  out.frequency_hz = sys.frequency_hz();
  const VectorXc& b = sys.rhs();
  if (b.norm() == 0.0) {
    out.p = VectorXc::Zero(b.size());
    return out;
  }
  out.p = fact.solve(b);
  const double rel = (sys.matrix() * out.p - b).norm() / b.norm();
  if (!(rel < 1e-10)) {
    std::ostringstream os;
    os << "solver: relative residual " << rel << " exceeds 1e-10 at "
       << sys.frequency_hz() << " Hz";
    throw NumericalError(os.str());
  }
  return out;
}

Complex analytic_monopole_2d(double f_hz, double r_m, const MaterialModel& m,
                             Complex amplitude) {
  if (r_m <= 0.0) {
    throw ConfigError("analytic_monopole_2d: r must be positive (singular at 0)");
  }
  const double k = 2.0 * kPi * f_hz / m.c_air;
  const double x = k * r_m;
  const Complex h0(std::cyl_bessel_j(0, x), std::cyl_neumann(0, x));
  return amplitude * m.rho_air * (kI / 4.0) * h0;
}

double analytic_monopole_power(double f_hz, const MaterialModel& m,
                               Complex amplitude) {
  const double k = 2.0 * kPi * f_hz / m.c_air;
  return m.rho_air * std::norm(amplitude) / (8.0 * m.c_air * k);
}

Complex sample_field(const VectorXc& p, const SimulationDomain& dom, double ui,
                     double uj) {
  const double x = ui - 0.5, y = uj - 0.5;
  int i0 = static_cast<int>(std::floor(x));
  int j0 = static_cast<int>(std::floor(y));
  i0 = std::max(0, std::min(dom.nx - 2, i0));
  j0 = std::max(0, std::min(dom.ny - 2, j0));
  const double fx = x - i0, fy = y - j0;
  return (1 - fx) * (1 - fy) * p[dom.idx(i0, j0)] +
         fx * (1 - fy) * p[dom.idx(i0 + 1, j0)] +
         (1 - fx) * fy * p[dom.idx(i0, j0 + 1)] +
         fx * fy * p[dom.idx(i0 + 1, j0 + 1)];
}

double radiated_power(const PressureField& p, const SimulationDomain& dom,
                      const CoefficientFields& coeffs, double circle_radius_m) {
  if (circle_radius_m <= 0) {
    throw ConfigError("radiated_power: radius must be positive");
  }
  const double h = dom.h;
  const double r_cells = circle_radius_m / h;
  const double ui0 = dom.source_i + 0.5, uj0 = dom.source_j + 0.5;
  const int m_samples =
      std::max(180, static_cast<int>(std::ceil(2.0 * kPi * r_cells)));
  const double dtheta = 2.0 * kPi / m_samples;
  const double omega = 2.0 * kPi * p.frequency_hz;
  const double rho = dom.material.rho_air;
  const double ir_air = 1.0 / rho;

  // Validate the circle (and the differencing stencil around it).
  for (int s = 0; s < m_samples; ++s) {
    const double th = s * dtheta;
    for (double rr : {r_cells - 1.0, r_cells, r_cells + 1.0}) {
      const int i = static_cast<int>(std::llround(ui0 + rr * std::cos(th) - 0.5));
      const int j = static_cast<int>(std::llround(uj0 + rr * std::sin(th) - 0.5));
      if (i < 0 || i >= dom.nx || j < 0 || j >= dom.ny || dom.in_pml(i, j)) {
        throw ConfigError("radiated_power: circle intersects the PML");
      }
      if (std::abs(coeffs.inv_rho[dom.idx(i, j)] - ir_air) > 1e-6 * ir_air) {
        throw ConfigError("radiated_power: circle intersects solid material");
      }
    }
  }

  double power = 0.0;
  for (int s = 0; s < m_samples; ++s) {
    const double th = s * dtheta;
    const double cs = std::cos(th), sn = std::sin(th);
    const Complex pc =
        sample_field(p.p, dom, ui0 + r_cells * cs, uj0 + r_cells * sn);
    const Complex pp = sample_field(p.p, dom, ui0 + (r_cells + 1.0) * cs,
                                    uj0 + (r_cells + 1.0) * sn);
    const Complex pm = sample_field(p.p, dom, ui0 + (r_cells - 1.0) * cs,
                                    uj0 + (r_cells - 1.0) * sn);
    const Complex dpdr = (pp - pm) / (2.0 * h);
    const Complex vr = dpdr / (kI * omega * rho);
    power += 0.5 * std::real(pc * std::conj(vr)) * circle_radius_m * dtheta;
  }
  return power;
}

}  // namespace scatopt
