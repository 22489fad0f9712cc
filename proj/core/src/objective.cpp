#include "scatopt/objective.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "scatopt/parallel.hpp"

namespace scatopt {

double evaluate_phi(const PressureField& p, const TargetColumn& target,
                    const SimulationDomain& dom,
                    const CoefficientFields* coeffs) {
  if (target.magnitude.size() != dom.target_arc.size()) {
    throw ConfigError("objective: target not defined on every arc sample");
  }
  const double ds = dom.arc_ds();
  const double ir_air = 1.0 / dom.material.rho_air;
  double phi = 0.0;
  for (size_t s = 0; s < dom.target_arc.size(); ++s) {
    const int c = dom.target_arc[s].cell;
    if (coeffs && std::abs(coeffs->inv_rho[c] - ir_air) > 1e-6 * ir_air) {
      std::ostringstream os;
      os << "objective: arc sample at " << dom.target_arc[s].theta_deg
         << " deg lies in solid material";
      throw ConfigError(os.str());
    }
    const double mism = std::norm(p.p[c]) - target.magnitude[s] * target.magnitude[s];
    phi += mism * mism * ds;
  }
  return phi;
}

AdjointField adjoint_solve(const AssembledSystem& sys,
                           const Factorization& fact, const PressureField& p,
                           const TargetColumn& target) {
  const SimulationDomain& dom = sys.domain();
  if (target.magnitude.size() != dom.target_arc.size()) {
    throw ConfigError("objective: target not defined on every arc sample");
  }
  const double ds = dom.arc_ds();
  VectorXc rhs = VectorXc::Zero(dom.cells());
  for (size_t s = 0; s < dom.target_arc.size(); ++s) {
    const int c = dom.target_arc[s].cell;
    const double mism =
        std::norm(p.p[c]) - target.magnitude[s] * target.magnitude[s];
    // dPhi = 2 Re(sum g_c dp_c) with g_c = 2 * mism * conj(p_c) * ds.
    rhs[c] -= 2.0 * mism * std::conj(p.p[c]) * ds;
  }
  AdjointField out;
  out.frequency_hz = sys.frequency_hz();
  out.lambda = fact.solve(rhs);
  return out;
}

Eigen::VectorXd frequency_gradient(const AssembledSystem& sys,
                                   const PressureField& p,
                                   const AdjointField& lambda) {
  const SimulationDomain& dom = sys.domain();
  const MaterialDerivatives md = material_derivatives(dom.material);
  const double inv_h2 = 1.0 / (dom.h * dom.h);
  const double w = sys.omega();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(dom.cells());

  for (int e : dom.design_cells) {
    const int i = e % dom.nx, j = e / dom.nx;
    Complex acc(0.0, 0.0);
    // Mass term on the diagonal.
    acc += w * w * md.d_inv_kappa * sys.stretch_x(i + 0.5) *
           sys.stretch_y(j + 0.5) * lambda.lambda[e] * p.p[e];
    // The four flux links; this cell contributes half of each face average.
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int fidx = 0; fidx < 4; ++fidx) {
      const int ii = i + di[fidx], jj = j + dj[fidx];
      if (ii < 0 || ii >= dom.nx || jj < 0 || jj >= dom.ny) continue;
      const int nb = dom.idx(ii, jj);
      Complex wf;
      if (dj[fidx] == 0) {
        wf = sys.stretch_y(j + 0.5) / sys.stretch_x(0.5 * (i + ii) + 0.5);
      } else {
        wf = sys.stretch_x(i + 0.5) / sys.stretch_y(0.5 * (j + jj) + 0.5);
      }
      const Complex dcf = 0.5 * md.d_inv_rho * wf * inv_h2;
      acc += dcf * (lambda.lambda[e] * p.p[nb] + lambda.lambda[nb] * p.p[e] -
                    lambda.lambda[e] * p.p[e] - lambda.lambda[nb] * p.p[nb]);
    }
    grad[e] = 2.0 * std::real(acc);
  }
  return grad;
}

Gradient total_gradient(const SimulationDomain& dom,
                        const std::vector<Eigen::VectorXd>& per_freq_grads,
                        const DensityField& xi_filtered, double beta,
                        double eta, const DensityFilter& filter) {
  if (per_freq_grads.empty()) {
    throw ConfigError("objective: no per-frequency gradients to aggregate");
  }
  for (const auto& g : per_freq_grads) {
    if (g.size() != xi_filtered.xi.size()) {
      throw ConfigError("objective: gradient/field shape mismatch");
    }
  }
  DensityField sens;
  sens.nx = xi_filtered.nx;
  sens.ny = xi_filtered.ny;
  sens.xi = Eigen::VectorXd::Zero(xi_filtered.xi.size());
  const double inv_nf = 1.0 / static_cast<double>(per_freq_grads.size());
  for (int c : dom.design_cells) {
    double mean = 0.0;
    for (const auto& g : per_freq_grads) mean += g[c];
    mean *= inv_nf;
    sens.xi[c] = mean * project_derivative(xi_filtered.xi[c], beta, eta);
  }
  const DensityField chained = filter.apply_transpose(sens);
  Gradient out;
  out.dphi_dxi = chained.xi;
  return out;
}

BandEval evaluate_band(const BandProblem& problem, const DensityField& xi,
                       bool with_gradient, int threads) {
  const SimulationDomain& dom = *problem.dom;
  const TargetSpec& targets = *problem.targets;
  const int nf = static_cast<int>(targets.columns.size());
  if (nf == 0) throw ConfigError("objective: target spec has no frequencies");

  const DensityField xi_f = problem.filter->apply(xi);
  const DensityField xi_p = apply_projection(xi_f, problem.beta, problem.eta);
  const CoefficientFields coeffs = interpolate_material(xi_p, dom);

  std::vector<double> per_phi(static_cast<size_t>(nf));
  std::vector<Eigen::VectorXd> per_grad(static_cast<size_t>(nf));

  parallel_for(nf, threads, [&](int k) {
    const TargetColumn& col = targets.columns[static_cast<size_t>(k)];
    AssembledSystem sys(dom, coeffs, problem.source, col.f_hz);
    Factorization fact(sys);
    PressureField p = solve(sys, fact);
    per_phi[static_cast<size_t>(k)] = evaluate_phi(p, col, dom, &coeffs);
    if (with_gradient) {
      AdjointField lam = adjoint_solve(sys, fact, p, col);
      per_grad[static_cast<size_t>(k)] = frequency_gradient(sys, p, lam);
    }
  });

  BandEval out;
  out.objective.frequencies = targets.frequencies();
  out.objective.per_frequency_phi = per_phi;
  out.objective.phi =
      std::accumulate(per_phi.begin(), per_phi.end(), 0.0) / nf;
  out.xi_physical = xi_p;
  if (with_gradient) {
    out.gradient = total_gradient(dom, per_grad, xi_f, problem.beta,
                                  problem.eta, *problem.filter);
  }
  return out;
}

}  // namespace scatopt
