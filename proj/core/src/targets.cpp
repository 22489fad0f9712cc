#include "scatopt/targets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace scatopt {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<double> equidistant(double f_min, double f_max, int n) {
  std::vector<double> out;
  if (n == 1) {
    out.push_back(0.5 * (f_min + f_max));
    return out;
  }
  for (int k = 0; k < n; ++k) {
    out.push_back(f_min + (f_max - f_min) * k / (n - 1));
  }
  return out;
}

// Super-Gaussian lobe scaled so that the target power over the arc equals
// gain^2 times the free-field monopole power over the same arc.
TargetColumn gaussian_column(const SimulationDomain& dom,
                             const SourceSpec& src, double f_hz,
                             double center_deg, const LobeShape& lobe) {
  const double span_lo = dom.target_arc.front().theta_deg;
  const double span_hi = dom.target_arc.back().theta_deg;
  if (center_deg < span_lo || center_deg > span_hi) {
    std::ostringstream os;
    os << "target: lobe center " << center_deg
       << " deg falls outside the arc span [" << span_lo << ", " << span_hi
       << "]";
    throw ConfigError(os.str());
  }
  const double a0 = std::abs(analytic_monopole_2d(
      f_hz, dom.target_radius_m, dom.material, src.amplitude));

  TargetColumn col;
  col.f_hz = f_hz;
  col.magnitude.resize(dom.target_arc.size());
  double shape_power = 0.0;
  for (size_t s = 0; s < dom.target_arc.size(); ++s) {
    const double d = dom.target_arc[s].theta_deg - center_deg;
    // exp(-ln2 * |2d/fwhm|^n): value 0.5 at d = +/-fwhm/2 for any exponent;
    // n = 2 reproduces the Gaussian with sigma = fwhm / (2 sqrt(2 ln 2)).
    const double g = std::exp(
        -std::log(2.0) *
        std::pow(std::abs(2.0 * d / lobe.fwhm_deg), lobe.exponent));
    col.magnitude[s] = g;
    shape_power += g * g;
  }
  // Free-field power over the arc is a0^2 per sample (uniform magnitude).
  const double scale =
      lobe.gain * a0 * std::sqrt(static_cast<double>(dom.target_arc.size()) /
                                 shape_power);
  for (double& m : col.magnitude) m *= scale;
  return col;
}
}  // namespace

std::vector<double> TargetSpec::frequencies() const {
  std::vector<double> out;
  out.reserve(columns.size());
  for (const auto& c : columns) out.push_back(c.f_hz);
  return out;
}

TargetSpec rainbow_target(const SimulationDomain& dom, const SourceSpec& src,
                          double f_min_hz, double f_max_hz, int n_frequencies,
                          double angle_min_deg, double angle_max_deg,
                          const LobeShape& lobe) {
  if (f_max_hz <= f_min_hz) {
    throw ConfigError("rainbow_target: f_max must exceed f_min");
  }
  if (n_frequencies < 1) {
    throw ConfigError("rainbow_target: need at least one design frequency");
  }
  TargetSpec spec;
  spec.kind = TargetKind::kRainbow;
  spec.f_min_hz = f_min_hz;
  spec.f_max_hz = f_max_hz;
  for (double f : equidistant(f_min_hz, f_max_hz, n_frequencies)) {
    const double center =
        angle_min_deg +
        (f - f_min_hz) / (f_max_hz - f_min_hz) * (angle_max_deg - angle_min_deg);
    spec.columns.push_back(gaussian_column(dom, src, f, center, lobe));
  }
  return spec;
}

TargetSpec splitter_target(const SimulationDomain& dom, const SourceSpec& src,
                           double f_lo_min_hz, double f_lo_max_hz,
                           double angle_lo_deg, double f_hi_min_hz,
                           double f_hi_max_hz, double angle_hi_deg,
                           int n_per_band, const LobeShape& lobe) {
  if (f_lo_max_hz <= f_lo_min_hz || f_hi_max_hz <= f_hi_min_hz) {
    throw ConfigError("splitter_target: band edges must be increasing");
  }
  if (f_hi_min_hz <= f_lo_max_hz) {
    throw ConfigError("splitter_target: bands must be separated by a gap");
  }
  if (n_per_band < 1) {
    throw ConfigError("splitter_target: need at least one frequency per band");
  }
  TargetSpec spec;
  spec.kind = TargetKind::kSplitter;
  spec.f_min_hz = f_lo_min_hz;
  spec.f_max_hz = f_hi_max_hz;
  for (double f : equidistant(f_lo_min_hz, f_lo_max_hz, n_per_band)) {
    spec.columns.push_back(gaussian_column(dom, src, f, angle_lo_deg, lobe));
  }
  for (double f : equidistant(f_hi_min_hz, f_hi_max_hz, n_per_band)) {
    spec.columns.push_back(gaussian_column(dom, src, f, angle_hi_deg, lobe));
  }
  return spec;
}

TargetSpec load_custom_target(const std::string& path,
                              const SimulationDomain& dom,
                              const std::vector<double>& design_frequencies,
                              std::string* log) {
  std::ifstream in(path);
  if (!in) throw IoError("target: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError("target: file " + path + " is empty");
  }
  // header line ignored
  std::map<double, std::vector<std::pair<double, double>>> rows;  // f -> (theta, mag)
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    double vals[3];
    for (int k = 0; k < 3; ++k) {
      if (!std::getline(ls, tok, ',')) {
        std::ostringstream os;
        os << "target: " << path << ":" << lineno << ": expected 3 columns";
        throw ConfigError(os.str());
      }
      try {
        vals[k] = std::stod(tok);
      } catch (const std::exception&) {
        std::ostringstream os;
        os << "target: " << path << ":" << lineno << ": bad number '" << tok
           << "'";
        throw ConfigError(os.str());
      }
    }
    if (vals[2] < 0) {
      std::ostringstream os;
      os << "target: " << path << ":" << lineno << ": magnitude must be >= 0";
      throw ConfigError(os.str());
    }
    rows[vals[0]].emplace_back(vals[1], vals[2]);
  }
  if (rows.empty()) {
    throw ConfigError("target: file " + path + " contains no data rows");
  }

  TargetSpec spec;
  spec.kind = TargetKind::kCustom;
  bool resampled = false;
  for (double f : design_frequencies) {
    // exact match first, then nearest within 0.5 Hz
    auto it = rows.lower_bound(f - 0.5);
    if (it == rows.end() || it->first > f + 0.5) {
      std::ostringstream os;
      os << "target: file " << path << " has no rows for design frequency "
         << f << " Hz";
      throw ConfigError(os.str());
    }
    TargetColumn col;
    col.f_hz = f;
    col.magnitude.resize(dom.target_arc.size());
    for (size_t s = 0; s < dom.target_arc.size(); ++s) {
      const double th = dom.target_arc[s].theta_deg;
      double best_d = 1e300, best_m = 0.0;
      for (const auto& [theta, mag] : it->second) {
        const double d = std::abs(theta - th);
        if (d < best_d) {
          best_d = d;
          best_m = mag;
        }
      }
      if (best_d > 1e-9) resampled = true;
      col.magnitude[s] = best_m;
    }
    spec.columns.push_back(std::move(col));
  }
  spec.f_min_hz = spec.columns.front().f_hz;
  spec.f_max_hz = spec.columns.back().f_hz;
  if (resampled && log) {
    *log += "target: angles resampled to the arc by nearest angle\n";
  }
  return spec;
}

void save_target(const TargetSpec& spec, const SimulationDomain& dom,
                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("target: cannot write " + path);
  out << "f_hz,theta_deg,magnitude\n";
  char buf[128];
  for (const auto& col : spec.columns) {
    for (size_t s = 0; s < col.magnitude.size(); ++s) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", col.f_hz,
                    dom.target_arc[s].theta_deg, col.magnitude[s]);
      out << buf;
    }
  }
}

}  // namespace scatopt
