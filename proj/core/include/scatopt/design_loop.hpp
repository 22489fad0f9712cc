#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scatopt/mma.hpp"
#include "scatopt/objective.hpp"

namespace scatopt {

struct LoopConfig {
  int max_iters = 200;
  double beta_init = 4.0;
  double beta_mult = 2.0;
  double beta_max = 32.0;
  int beta_period = 40;       // iterations between continuation steps
  double tol_dx = 1e-3;       // on ||dx||_inf, at maximal beta
  double eta = 0.5;
  double filter_radius_m = 0.0;  // 0 -> 3h
  double move_limit = 0.2;
  std::optional<double> volume_fraction;  // mean density bound; off by default
  double initial_density = 0.5;
  int checkpoint_every = 0;            // 0 disables checkpointing
  std::string checkpoint_prefix;       // "<prefix>_<iter>.{state,density}.txt"
  int threads = 1;
};

struct IterRecord {
  int iter = 0;
  double phi = 0.0;
  double max_gradient = 0.0;
  double beta = 0.0;
};

struct DesignResult {
  DensityField xi;           // raw design variables
  DensityField xi_physical;  // filtered + projected blueprint densities
  Objective objective;       // at the final design
  std::vector<IterRecord> history;
};

/// Everything needed to resume a run bit-exactly.
struct Checkpoint {
  int next_iter = 1;
  double beta = 0.0;
  int beta_iters = 0;
  double phi_scale = 0.0;  // 0 -> not yet established
  DensityField xi;
  MMAState mma;
};

void save_checkpoint(const Checkpoint& ck, const std::string& prefix);
Checkpoint load_checkpoint(const std::string& prefix);

using IterCallback = std::function<void(const IterRecord&)>;

/// The outer design loop: solve -> adjoint -> gradient -> MMA update with
/// beta continuation. Deterministic for a fixed configuration.
DesignResult run_design(const SimulationDomain& dom, const DensityFilter& filter,
                        const SourceSpec& source, const TargetSpec& targets,
                        const LoopConfig& cfg,
                        const Checkpoint* resume = nullptr,
                        const IterCallback& on_iter = {});

}  // namespace scatopt
