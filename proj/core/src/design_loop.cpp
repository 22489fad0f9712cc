#include "scatopt/design_loop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "scatopt/io.hpp"

namespace scatopt {

namespace {

void write_vector(std::ofstream& out, const char* name,
                  const Eigen::VectorXd& v) {
  out << name;
  char buf[64];
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    std::snprintf(buf, sizeof(buf), " %.17g", v[k]);
    out << buf;
  }
  out << "\n";
}

Eigen::VectorXd read_vector(std::ifstream& in, const std::string& name,
                            const std::string& path) {
  std::string tag;
  if (!(in >> tag) || tag != name) {
    throw IoError(path + ": expected field '" + name + "'");
  }
  std::string rest;
  std::getline(in, rest);
  std::istringstream ls(rest);
  std::vector<double> vals;
  double v;
  while (ls >> v) vals.push_back(v);
  return Eigen::Map<Eigen::VectorXd>(vals.data(),
                                     static_cast<Eigen::Index>(vals.size()));
}

double read_scalar(std::ifstream& in, const std::string& name,
                   const std::string& path) {
  std::string tag;
  double v;
  if (!(in >> tag >> v) || tag != name) {
    throw IoError(path + ": expected field '" + name + "'");
  }
  return v;
}
}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::string& prefix) {
  const std::string state_path = prefix + ".state.txt";
  std::ofstream out(state_path);
  if (!out) throw IoError("cannot write " + state_path);
  char buf[64];
  out << "scatopt-checkpoint 1\n";
  out << "next_iter " << ck.next_iter << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", ck.beta);
  out << "beta " << buf << "\n";
  out << "beta_iters " << ck.beta_iters << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", ck.phi_scale);
  out << "phi_scale " << buf << "\n";
  out << "mma_iter " << ck.mma.iter << "\n";
  write_vector(out, "low", ck.mma.low);
  write_vector(out, "upp", ck.mma.upp);
  write_vector(out, "xold1", ck.mma.xold1);
  write_vector(out, "xold2", ck.mma.xold2);
  if (!out) throw IoError("error while writing " + state_path);
  write_matrix(prefix + ".density.txt", ck.xi.xi, ck.xi.nx, ck.xi.ny);
}

Checkpoint load_checkpoint(const std::string& prefix) {
  const std::string state_path = prefix + ".state.txt";
  std::ifstream in(state_path);
  if (!in) throw IoError("cannot open " + state_path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "scatopt-checkpoint" || version != 1) {
    throw IoError(state_path + ": not a checkpoint state file");
  }
  Checkpoint ck;
  ck.next_iter = static_cast<int>(read_scalar(in, "next_iter", state_path));
  ck.beta = read_scalar(in, "beta", state_path);
  ck.beta_iters = static_cast<int>(read_scalar(in, "beta_iters", state_path));
  ck.phi_scale = read_scalar(in, "phi_scale", state_path);
  ck.mma.iter = static_cast<int>(read_scalar(in, "mma_iter", state_path));
  ck.mma.low = read_vector(in, "low", state_path);
  ck.mma.upp = read_vector(in, "upp", state_path);
  ck.mma.xold1 = read_vector(in, "xold1", state_path);
  ck.mma.xold2 = read_vector(in, "xold2", state_path);
  ck.xi.xi = read_matrix(prefix + ".density.txt", &ck.xi.nx, &ck.xi.ny);
  return ck;
}

DesignResult run_design(const SimulationDomain& dom,
                        const DensityFilter& filter, const SourceSpec& source,
                        const TargetSpec& targets, const LoopConfig& cfg,
                        const Checkpoint* resume, const IterCallback& on_iter) {
  if (cfg.beta_mult <= 1.0) {
    throw ConfigError("loop: beta multiplier must exceed 1");
  }
  if (cfg.tol_dx <= 0.0) throw ConfigError("loop: tolerance must be positive");

  const int n = static_cast<int>(dom.design_cells.size());
  if (n == 0) throw ConfigError("loop: empty design region");
  const int m = cfg.volume_fraction ? 1 : 0;

  MMAOptions mma_opts;
  mma_opts.move_limit = cfg.move_limit;
  MMA mma(n, m, mma_opts);

  DensityField xi = DensityField::uniform(dom, cfg.initial_density);
  double beta = cfg.beta_init;
  int beta_iters = 0;
  double phi_scale = 0.0;
  int start_iter = 1;
  if (resume) {
    if (resume->xi.xi.size() != dom.cells()) {
      throw ConfigError("loop: checkpoint density does not match the domain");
    }
    xi.xi = resume->xi.xi;
    beta = resume->beta;
    beta_iters = resume->beta_iters;
    phi_scale = resume->phi_scale;
    start_iter = resume->next_iter;
    mma.restore(resume->mma);
  }

  const Eigen::VectorXd xmin = Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd xmax = Eigen::VectorXd::Ones(n);

  BandProblem problem;
  problem.dom = &dom;
  problem.filter = &filter;
  problem.source = source;
  problem.targets = &targets;
  problem.eta = cfg.eta;

  DesignResult result;
  auto pack = [&](const Eigen::VectorXd& full) {
    Eigen::VectorXd v(n);
    for (int k = 0; k < n; ++k) v[k] = full[dom.design_cells[k]];
    return v;
  };

  for (int iter = start_iter; iter <= cfg.max_iters; ++iter) {
    problem.beta = beta;
    BandEval eval = evaluate_band(problem, xi, /*with_gradient=*/true,
                                  cfg.threads);
    if (!std::isfinite(eval.objective.phi)) {
      std::ostringstream os;
      os << "loop: non-finite objective at iteration " << iter;
      throw NumericalError(os.str());
    }
    if (phi_scale == 0.0) {
      phi_scale = eval.objective.phi > 0 ? 1.0 / eval.objective.phi : 1.0;
    }

    const Eigen::VectorXd grad = pack(eval.gradient.dphi_dxi) * phi_scale;
    IterRecord rec{iter, eval.objective.phi,
                   grad.size() ? grad.cwiseAbs().maxCoeff() : 0.0, beta};
    result.history.push_back(rec);
    if (on_iter) on_iter(rec);

    Eigen::VectorXd x = pack(xi.xi);
    Eigen::VectorXd fval(m);
    Eigen::MatrixXd dfdx(m, n);
    if (m == 1) {
      fval[0] = x.mean() - *cfg.volume_fraction;
      dfdx.row(0).setConstant(1.0 / n);
    }
    Eigen::VectorXd xnew;
    try {
      xnew = mma.update(x, grad, fval, dfdx, xmin, xmax);
    } catch (const NumericalError& e) {
      std::ostringstream os;
      os << e.what() << " (iteration " << iter << ")";
      throw NumericalError(os.str());
    }
    const double dx_inf = (xnew - x).lpNorm<Eigen::Infinity>();
    for (int k = 0; k < n; ++k) xi.xi[dom.design_cells[k]] = xnew[k];

    ++beta_iters;
    const bool stagnant = dx_inf < cfg.tol_dx;
    bool stop = false;
    if (beta < cfg.beta_max && (beta_iters >= cfg.beta_period || stagnant)) {
      beta = std::min(beta * cfg.beta_mult, cfg.beta_max);
      beta_iters = 0;
    } else if (stagnant && beta >= cfg.beta_max) {
      stop = true;
    }

    // Saved after the continuation update so a resumed run replays the
    // remaining iterations with the same beta schedule.
    if (cfg.checkpoint_every > 0 && !cfg.checkpoint_prefix.empty() &&
        iter % cfg.checkpoint_every == 0) {
      Checkpoint ck;
      ck.next_iter = iter + 1;
      ck.beta = beta;
      ck.beta_iters = beta_iters;
      ck.phi_scale = phi_scale;
      ck.xi = xi;
      ck.mma = mma.state();
      std::ostringstream name;
      name << cfg.checkpoint_prefix << "_" << iter;
      save_checkpoint(ck, name.str());
    }
    if (stop) break;
  }

  problem.beta = beta;
  BandEval final_eval =
      evaluate_band(problem, xi, /*with_gradient=*/false, cfg.threads);
  result.xi = xi;
  result.xi_physical = final_eval.xi_physical;
  result.objective = final_eval.objective;
  return result;
}

}  // namespace scatopt
