#include "scatopt/farfield.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "scatopt/io.hpp"
#include "scatopt/parallel.hpp"

namespace scatopt {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<double> directivity(const PressureField& p,
                                const SimulationDomain& dom) {
  if (dom.target_arc.empty()) {
    throw ConfigError("directivity: domain has no target arc");
  }
  std::vector<double> col(dom.target_arc.size());
  for (size_t s = 0; s < dom.target_arc.size(); ++s) {
    col[s] = std::norm(p.p[dom.target_arc[s].cell]);
  }
  return col;
}

double main_lobe_angle(const std::vector<double>& column,
                       const std::vector<double>& angles_deg) {
  if (column.empty() || column.size() != angles_deg.size()) {
    throw ConfigError("main_lobe_angle: column/angle size mismatch");
  }
  size_t best = 0;
  for (size_t k = 1; k < column.size(); ++k) {
    if (column[k] > column[best]) best = k;
  }
  double angle = angles_deg[best];
  if (best > 0 && best + 1 < column.size()) {
    const double yl = column[best - 1], yc = column[best],
                 yr = column[best + 1];
    const double denom = yl - 2.0 * yc + yr;
    if (denom < 0.0) {
      const double delta = 0.5 * (yl - yr) / denom;
      const double dtheta = angles_deg[best + 1] - angles_deg[best];
      angle += delta * dtheta;
    }
  }
  return angle;
}

LobeInterval fwhm_interval(const std::vector<double>& column) {
  if (column.empty()) throw ConfigError("fwhm_interval: empty column");
  size_t peak = 0;
  for (size_t k = 1; k < column.size(); ++k) {
    if (column[k] > column[peak]) peak = k;
  }
  const double half = 0.5 * column[peak];
  LobeInterval iv;
  int lo = static_cast<int>(peak), hi = static_cast<int>(peak);
  while (lo > 0 && column[static_cast<size_t>(lo - 1)] >= half) --lo;
  while (hi + 1 < static_cast<int>(column.size()) &&
         column[static_cast<size_t>(hi + 1)] >= half) {
    ++hi;
  }
  iv.lo = lo;
  iv.hi = hi;
  return iv;
}

double lobe_ratio_db(const std::vector<double>& column) {
  const LobeInterval iv = fwhm_interval(column);
  const int n = static_cast<int>(column.size());
  double peak = 0.0;
  for (double v : column) peak = std::max(peak, v);
  // Skip two shoulder samples on each side of the FWHM interval.
  const int lo_lim = iv.lo - 3, hi_lim = iv.hi + 3;
  double side = 0.0;
  bool found = false;
  for (int k = 0; k < n; ++k) {
    if (k > lo_lim && k < hi_lim) continue;
    const double v = column[static_cast<size_t>(k)];
    const bool up = k == 0 || v > column[static_cast<size_t>(k - 1)];
    const bool down = k == n - 1 || v >= column[static_cast<size_t>(k + 1)];
    if (up && down && v > 0.0) {
      side = std::max(side, v);
      found = true;
    }
  }
  if (!found || side == 0.0) {
    return std::numeric_limits<double>::infinity();  // no side lobe
  }
  return 10.0 * std::log10(peak / side);
}

double lobe_power_fraction(const std::vector<double>& column,
                           const LobeInterval& lobe) {
  if (column.empty()) throw ConfigError("lobe_power_fraction: empty column");
  if (lobe.lo < 0 || lobe.hi >= static_cast<int>(column.size()) ||
      lobe.lo > lobe.hi) {
    throw ConfigError("lobe_power_fraction: invalid lobe interval");
  }
  double total = 0.0, in_lobe = 0.0;
  for (int k = 0; k < static_cast<int>(column.size()); ++k) {
    total += column[static_cast<size_t>(k)];
    if (k >= lobe.lo && k <= lobe.hi) in_lobe += column[static_cast<size_t>(k)];
  }
  if (total <= 0.0) return 0.0;
  return in_lobe / total;
}

double radiation_efficiency(double device_power_w, double free_field_power_w) {
  if (free_field_power_w <= 0.0) {
    throw ConfigError("radiation_efficiency: free-field reference power must be positive");
  }
  return device_power_w / free_field_power_w;
}

void normalize_per_frequency(DirectivityMap& map) {
  for (Eigen::Index c = 0; c < map.power.cols(); ++c) {
    const double mx = map.power.col(c).maxCoeff();
    if (mx > 0.0) map.power.col(c) /= mx;
  }
  map.normalized = true;
}

DirectivityMap emission_map(const SimulationDomain& dom,
                            const CoefficientFields& coeffs,
                            const SourceSpec& source,
                            const SweepConfig& sweep) {
  if (sweep.samples < 1) throw ConfigError("emission_map: samples must be >= 1");
  if (sweep.samples > 1 && sweep.f_max_hz <= sweep.f_min_hz) {
    throw ConfigError("emission_map: f_max must exceed f_min");
  }
  std::vector<double> freqs;
  if (sweep.samples == 1) {
    freqs.push_back(sweep.f_min_hz > 0 ? sweep.f_min_hz : sweep.f_max_hz);
  } else {
    for (int k = 0; k < sweep.samples; ++k) {
      freqs.push_back(sweep.f_min_hz +
                      (sweep.f_max_hz - sweep.f_min_hz) * k /
                          (sweep.samples - 1));
    }
  }
  for (double f : sweep.extra_frequencies) freqs.push_back(f);
  std::sort(freqs.begin(), freqs.end());
  freqs.erase(std::unique(freqs.begin(), freqs.end(),
                          [](double a, double b) {
                            return std::abs(a - b) < 1e-9 * std::max(a, b);
                          }),
              freqs.end());

  DirectivityMap map;
  map.frequencies_hz = freqs;
  map.angles_deg.reserve(dom.target_arc.size());
  for (const auto& a : dom.target_arc) map.angles_deg.push_back(a.theta_deg);
  map.power.resize(static_cast<Eigen::Index>(dom.target_arc.size()),
                   static_cast<Eigen::Index>(freqs.size()));

  parallel_for(static_cast<int>(freqs.size()), sweep.threads, [&](int k) {
    AssembledSystem sys(dom, coeffs, source, freqs[static_cast<size_t>(k)]);
    PressureField p = solve(sys);
    const std::vector<double> col = directivity(p, dom);
    for (size_t s = 0; s < col.size(); ++s) {
      map.power(static_cast<Eigen::Index>(s), k) = col[s];
    }
  });
  if (sweep.normalize) normalize_per_frequency(map);
  return map;
}

void save_directivity_map(const DirectivityMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  out << "angles_deg";
  for (double a : map.angles_deg) {
    out << ",";
    put(a);
  }
  out << "\nfrequencies_hz";
  for (double f : map.frequencies_hz) {
    out << ",";
    put(f);
  }
  out << "\nnormalized," << (map.normalized ? 1 : 0) << "\n";
  for (Eigen::Index r = 0; r < map.power.rows(); ++r) {
    for (Eigen::Index c = 0; c < map.power.cols(); ++c) {
      if (c) out << ",";
      put(map.power(r, c));
    }
    out << "\n";
  }
  if (!out) throw IoError("error while writing " + path);
}

DirectivityMap load_directivity_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  DirectivityMap map;
  std::string line;
  auto parse_list = [&](const std::string& tag) {
    if (!std::getline(in, line)) throw IoError(path + ": truncated header");
    std::istringstream ls(line);
    std::string tok;
    std::getline(ls, tok, ',');
    if (tok != tag) throw IoError(path + ": expected header row '" + tag + "'");
    std::vector<double> vals;
    while (std::getline(ls, tok, ',')) vals.push_back(std::stod(tok));
    return vals;
  };
  map.angles_deg = parse_list("angles_deg");
  map.frequencies_hz = parse_list("frequencies_hz");
  const std::vector<double> norm = parse_list("normalized");
  map.normalized = !norm.empty() && norm[0] != 0.0;
  map.power.resize(static_cast<Eigen::Index>(map.angles_deg.size()),
                   static_cast<Eigen::Index>(map.frequencies_hz.size()));
  for (Eigen::Index r = 0; r < map.power.rows(); ++r) {
    if (!std::getline(in, line)) throw IoError(path + ": truncated matrix");
    std::istringstream ls(line);
    std::string tok;
    for (Eigen::Index c = 0; c < map.power.cols(); ++c) {
      if (!std::getline(ls, tok, ',')) throw IoError(path + ": short row");
      map.power(r, c) = std::stod(tok);
    }
  }
  return map;
}

void write_rainbow_image(const DirectivityMap& map, const std::string& path,
                         int size_px) {
  if (map.angles_deg.empty() || map.frequencies_hz.empty()) {
    throw ConfigError("rainbow image: empty map");
  }
  const double f_lo = map.frequencies_hz.front();
  const double f_hi = map.frequencies_hz.back();
  const double th_lo = map.angles_deg.front();
  const double th_hi = map.angles_deg.back();
  const int w = size_px, h = size_px;
  std::vector<unsigned char> rgb(static_cast<size_t>(w) * h * 3, 0);
  const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
  const double r_out = 0.48 * size_px, r_in = 0.16 * size_px;

  auto hue_of = [&](double f) {
    if (f_hi <= f_lo) return 0.0;
    return 270.0 * (f - f_lo) / (f_hi - f_lo);
  };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = x - cx, dy = cy - y;
      const double r = std::hypot(dx, dy);
      if (r < r_in || r > r_out) continue;
      const double th = std::atan2(dy, dx) * 180.0 / kPi;
      if (th < th_lo || th > th_hi) continue;
      // nearest arc sample
      size_t best = 0;
      double bd = 1e300;
      for (size_t s = 0; s < map.angles_deg.size(); ++s) {
        const double d = std::abs(map.angles_deg[s] - th);
        if (d < bd) {
          bd = d;
          best = s;
        }
      }
      double wr = 0, wg = 0, wb = 0, wsum = 0, pmax = 0;
      for (size_t c = 0; c < map.frequencies_hz.size(); ++c) {
        const double p =
            std::max(0.0, map.power(static_cast<Eigen::Index>(best),
                                    static_cast<Eigen::Index>(c)));
        if (p <= 0) continue;
        const auto col = hsv_to_rgb(hue_of(map.frequencies_hz[c]), 1.0, 1.0);
        wr += p * col[0];
        wg += p * col[1];
        wb += p * col[2];
        wsum += p;
        pmax = std::max(pmax, p);
      }
      const size_t off = (static_cast<size_t>(y) * w + x) * 3;
      if (wsum > 0) {
        const double scale = std::min(1.0, pmax) / wsum;
        rgb[off] = static_cast<unsigned char>(std::lround(wr * scale));
        rgb[off + 1] = static_cast<unsigned char>(std::lround(wg * scale));
        rgb[off + 2] = static_cast<unsigned char>(std::lround(wb * scale));
      }
    }
  }
  write_ppm(path, rgb, w, h);
}

}  // namespace scatopt
