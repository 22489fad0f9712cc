#pragma once

#include <optional>
#include <string>

#include "scatopt/design_loop.hpp"
#include "scatopt/domain.hpp"
#include "scatopt/targets.hpp"

namespace scatopt {

struct TargetConfig {
  TargetKind kind = TargetKind::kRainbow;
  // rainbow
  double f_min_hz = 0.0, f_max_hz = 0.0;
  int num_frequencies = 8;
  double angle_min_deg = 0.0, angle_max_deg = 0.0;
  // splitter
  double band_lo_min_hz = 0.0, band_lo_max_hz = 0.0, band_lo_angle_deg = 0.0;
  double band_hi_min_hz = 0.0, band_hi_max_hz = 0.0, band_hi_angle_deg = 0.0;
  int num_per_band = 4;
  // custom
  std::string file;
  std::vector<double> frequencies;  // design frequencies for custom targets
  LobeShape lobe;
};

struct RunConfig {
  DomainConfig domain;
  TargetConfig target;
  LoopConfig optimizer;
  Complex source_amplitude = Complex(1.0, 0.0);
  std::string output_dir = "out";
  int threads = 1;
  bool deterministic = false;
  int sweep_samples = 64;
};

/// Parses and validates a JSON run configuration. Throws ConfigError with a
/// field-level diagnostic on any problem.
RunConfig load_run_config(const std::string& path);

/// Builds the target spec named by the config against a built domain.
TargetSpec build_targets(const RunConfig& cfg, const SimulationDomain& dom,
                         const SourceSpec& src, std::string* log = nullptr);

SourceSpec make_source(const RunConfig& cfg, const SimulationDomain& dom);

}  // namespace scatopt
