#pragma once

#include <optional>
#include <vector>

#include "scatopt/domain.hpp"
#include "scatopt/solver.hpp"
#include "scatopt/targets.hpp"

namespace scatopt {

struct Objective {
  double phi = 0.0;                      // mean over design frequencies
  std::vector<double> per_frequency_phi;
  std::vector<double> frequencies;
};

struct Gradient {
  Eigen::VectorXd dphi_dxi;  // full grid; zero outside the design mask
};

struct AdjointField {
  VectorXc lambda;
  double frequency_hz = 0.0;
};

/// Phi_f = sum over arc samples of (|p|^2 - |p_target|^2)^2 * ds.
double evaluate_phi(const PressureField& p, const TargetColumn& target,
                    const SimulationDomain& dom,
                    const CoefficientFields* coeffs = nullptr);

/// Solves A^T lambda = -(dPhi_f/dp)^T; the right-hand side is supported on
/// the target arc only. Reuses the forward factorization (A = A^T).
AdjointField adjoint_solve(const AssembledSystem& sys, const Factorization& fact,
                           const PressureField& p, const TargetColumn& target);

/// dPhi_f/dxi_projected for one frequency: 2 Re(lambda^T (dA/dxi) p).
Eigen::VectorXd frequency_gradient(const AssembledSystem& sys,
                                   const PressureField& p,
                                   const AdjointField& lambda);

/// Chains per-frequency sensitivities through the projection derivative and
/// the filter transpose; mean over frequencies.
Gradient total_gradient(const SimulationDomain& dom,
                        const std::vector<Eigen::VectorXd>& per_freq_grads,
                        const DensityField& xi_filtered, double beta,
                        double eta, const DensityFilter& filter);

/// One design problem: domain + source + targets + regularization chain.
struct BandProblem {
  const SimulationDomain* dom = nullptr;
  const DensityFilter* filter = nullptr;
  SourceSpec source;
  const TargetSpec* targets = nullptr;
  double beta = 4.0;
  double eta = 0.5;
};

struct BandEval {
  Objective objective;
  Gradient gradient;  // empty unless requested
  DensityField xi_physical;
};

/// Full forward (+ optional adjoint) sweep over the design frequencies.
/// Per-frequency solves run as independent tasks; the reduction order is
/// fixed so results are bit-reproducible for any thread count.
BandEval evaluate_band(const BandProblem& problem, const DensityField& xi,
                       bool with_gradient, int threads);

}  // namespace scatopt
