#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#ifdef SCATOPT_WITH_UMFPACK
#include <Eigen/UmfPackSupport>
#endif
#include <complex>
#include <memory>

#include "scatopt/domain.hpp"

namespace scatopt {

using Complex = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using SparseMatrixXc = Eigen::SparseMatrix<Complex>;

struct SourceSpec {
  int i = 0, j = 0;
  Complex amplitude = Complex(1.0, 0.0);  // volume-source strength
};

struct PressureField {
  VectorXc p;
  double frequency_hz = 0.0;
};

/// Discrete Helmholtz operator div(1/rho grad p) + w^2/kappa p = -q with
/// complex coordinate stretching inside the PML frame. The matrix is
/// complex-symmetric by construction.
class AssembledSystem {
 public:
  AssembledSystem(const SimulationDomain& dom, const CoefficientFields& coeffs,
                  const SourceSpec& source, double f_hz);

  const SparseMatrixXc& matrix() const { return A_; }
  const VectorXc& rhs() const { return b_; }
  double frequency_hz() const { return f_hz_; }
  double omega() const;
  const SimulationDomain& domain() const { return *dom_; }

  /// Coordinate-stretch factors at fractional cell index (cell i has its
  /// center at u = i + 0.5; faces sit at integer u).
  Complex stretch_x(double u) const;
  Complex stretch_y(double u) const;

 private:
  const SimulationDomain* dom_;
  double f_hz_;
  double sigma_max_x_ = 0.0, sigma_max_y_ = 0.0;
  SparseMatrixXc A_;
  VectorXc b_;
};

/// Sparse direct factorization, reusable for forward and adjoint right-hand
/// sides (the matrix is symmetric, so no transposed solve is needed).
class Factorization {
 public:
  explicit Factorization(const AssembledSystem& sys);
  VectorXc solve(const VectorXc& rhs) const;
  double frequency_hz() const { return f_hz_; }

 private:
#ifdef SCATOPT_WITH_UMFPACK
  Eigen::UmfPackLU<SparseMatrixXc> lu_;
#else
  Eigen::SparseLU<SparseMatrixXc> lu_;
#endif
  double f_hz_;
};

/// Forward solve with residual check (relative residual < 1e-10).
PressureField solve(const AssembledSystem& sys);
PressureField solve(const AssembledSystem& sys, const Factorization& fact);

/// Outgoing free-field cylindrical wave of a 2D monopole:
/// p(r) = amplitude * rho * (i/4) * H0^(1)(k r).
Complex analytic_monopole_2d(double f_hz, double r_m, const MaterialModel& m,
                             Complex amplitude);

/// Closed-form radiated power per unit depth of the free-field monopole.
double analytic_monopole_power(double f_hz, const MaterialModel& m,
                               Complex amplitude);

/// Integrates the radial acoustic intensity 0.5*Re(p conj(v_r)) over a
/// circle centered on the source. The circle must stay in air, outside the
/// PML; `coeffs` is used for the solid check.
double radiated_power(const PressureField& p, const SimulationDomain& dom,
                      const CoefficientFields& coeffs, double circle_radius_m);

/// Bilinear sample of a complex grid field at fractional cell coordinates.
Complex sample_field(const VectorXc& p, const SimulationDomain& dom, double ui,
                     double uj);

}  // namespace scatopt
