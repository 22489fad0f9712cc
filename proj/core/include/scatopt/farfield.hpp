#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "scatopt/objective.hpp"

namespace scatopt {

/// Angle x frequency matrix of emitted power on the target arc.
struct DirectivityMap {
  std::vector<double> angles_deg;
  std::vector<double> frequencies_hz;
  Eigen::MatrixXd power;  // (n_angles x n_frequencies), linear units
  bool normalized = false;  // per-frequency max normalization applied
};

/// |p|^2 sampled along the target arc, ordered by angle.
std::vector<double> directivity(const PressureField& p,
                                const SimulationDomain& dom);

/// Argmax angle with quadratic sub-sample refinement; ties break toward the
/// smaller angle.
double main_lobe_angle(const std::vector<double>& column,
                       const std::vector<double>& angles_deg);

/// Half-open index interval [lo, hi] of the main lobe at full width half
/// maximum, on the linear-power column.
struct LobeInterval {
  int lo = 0, hi = 0;  // inclusive sample indices
};
LobeInterval fwhm_interval(const std::vector<double>& column);

/// Main-lobe peak over the largest local maximum outside the FWHM interval,
/// in dB. Returns infinity when no side lobe exists; the two samples
/// adjacent to each FWHM edge are excluded from the search.
double lobe_ratio_db(const std::vector<double>& column);

/// Power inside `lobe` divided by the power over the full measured span.
double lobe_power_fraction(const std::vector<double>& column,
                           const LobeInterval& lobe);

/// Device radiated power over the free-field power of the same source.
double radiation_efficiency(double device_power_w, double free_field_power_w);

struct SweepConfig {
  double f_min_hz = 0.0, f_max_hz = 0.0;
  int samples = 64;
  std::vector<double> extra_frequencies;  // design frequencies to include
  bool normalize = true;
  int threads = 1;
};

/// Directivity columns over a dense frequency sweep of one fixed design.
DirectivityMap emission_map(const SimulationDomain& dom,
                            const CoefficientFields& coeffs,
                            const SourceSpec& source, const SweepConfig& sweep);

void normalize_per_frequency(DirectivityMap& map);

/// CSV with header rows for angles and frequencies.
void save_directivity_map(const DirectivityMap& map, const std::string& path);
DirectivityMap load_directivity_map(const std::string& path);

/// Polar color image of the map: hue follows frequency, intensity follows
/// normalized power.
void write_rainbow_image(const DirectivityMap& map, const std::string& path,
                         int size_px = 512);

}  // namespace scatopt
