#pragma once

#include <string>
#include <vector>

#include "scatopt/domain.hpp"
#include "scatopt/solver.hpp"

namespace scatopt {

enum class TargetKind { kRainbow, kSplitter, kCustom };

/// Desired pressure magnitude |p_target| on the target arc at one design
/// frequency.
struct TargetColumn {
  double f_hz = 0.0;
  std::vector<double> magnitude;  // one value per arc sample
};

struct TargetSpec {
  TargetKind kind = TargetKind::kCustom;
  double f_min_hz = 0.0, f_max_hz = 0.0;  // band edges
  std::vector<TargetColumn> columns;      // one per design frequency

  std::vector<double> frequencies() const;
};

struct LobeShape {
  double fwhm_deg = 20.0;
  double gain = 1.2;  // target power = gain^2 x free-field power on the arc
  // Super-Gaussian exponent: 2 is a plain Gaussian; larger values flatten the
  // lobe top and steepen its shoulders, which concentrates the lobe's power
  // inside its own half-power interval.
  double exponent = 2.0;
};

/// Gaussian lobe whose center moves linearly from angle_min at f_min to
/// angle_max at f_max.
TargetSpec rainbow_target(const SimulationDomain& dom, const SourceSpec& src,
                          double f_min_hz, double f_max_hz, int n_frequencies,
                          double angle_min_deg, double angle_max_deg,
                          const LobeShape& lobe);

/// Two fixed-direction bands; frequencies in the gap carry no target and are
/// excluded from the objective.
TargetSpec splitter_target(const SimulationDomain& dom, const SourceSpec& src,
                           double f_lo_min_hz, double f_lo_max_hz,
                           double angle_lo_deg, double f_hi_min_hz,
                           double f_hi_max_hz, double angle_hi_deg,
                           int n_per_band, const LobeShape& lobe);

/// CSV rows (f_hz, theta_deg, magnitude) with a one-line header. Angles are
/// resampled to the arc by nearest angle when they do not match exactly; a
/// note is appended to `log` when that happens.
TargetSpec load_custom_target(const std::string& path,
                              const SimulationDomain& dom,
                              const std::vector<double>& design_frequencies,
                              std::string* log = nullptr);

void save_target(const TargetSpec& spec, const SimulationDomain& dom,
                 const std::string& path);

}  // namespace scatopt
