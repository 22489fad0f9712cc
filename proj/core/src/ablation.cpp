#include "scatopt/ablation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <queue>

#include "scatopt/io.hpp"
#include "scatopt/parallel.hpp"

namespace scatopt {

namespace {

/// Phi for a fixed design: no filtering or projection, the densities are
/// taken as physical.
Objective physical_phi(const DensityField& design, const SimulationDomain& dom,
                     const SourceSpec& source, const TargetSpec& targets,
                     int threads) {
  const CoefficientFields coeffs = interpolate_material(design, dom);
  const int nf = static_cast<int>(targets.columns.size());
  std::vector<double> per(static_cast<size_t>(nf));
  parallel_for(nf, threads, [&](int k) {
    const TargetColumn& col = targets.columns[static_cast<size_t>(k)];
    AssembledSystem sys(dom, coeffs, source, col.f_hz);
    PressureField p = solve(sys);
    per[static_cast<size_t>(k)] = evaluate_phi(p, col, dom, &coeffs);
  });
  Objective obj;
  obj.frequencies = targets.frequencies();
  obj.per_frequency_phi = per;
  obj.phi = std::accumulate(per.begin(), per.end(), 0.0) / nf;
  return obj;
}

double source_off_phi(const SimulationDomain& dom, const TargetSpec& targets) {
  const double ds = dom.arc_ds();
  double phi = 0.0;
  for (const auto& col : targets.columns) {
    double f = 0.0;
    for (double m : col.magnitude) f += m * m * m * m * ds;
    phi += f;
  }
  return phi / static_cast<double>(targets.columns.size());
}
}  // namespace

FeatureLabeling label_features(const DensityField& design,
                               const SimulationDomain& dom) {
  if (design.xi.size() != dom.cells()) {
    throw ConfigError("label_features: field does not match the domain");
  }
  const int nx = dom.nx, ny = dom.ny;
  FeatureLabeling out;
  out.label.assign(static_cast<size_t>(dom.cells()), 0);
  std::vector<std::uint8_t> solid(static_cast<size_t>(dom.cells()), 0);
  for (int c = 0; c < dom.cells(); ++c) solid[c] = design.xi[c] >= 0.5;

  int next_id = 0;
  for (int c0 = 0; c0 < dom.cells(); ++c0) {
    if (!solid[c0] || out.label[c0] != 0) continue;
    Feature feat;
    feat.id = ++next_id;
    std::queue<int> frontier;
    frontier.push(c0);
    out.label[c0] = feat.id;
    while (!frontier.empty()) {
      const int c = frontier.front();
      frontier.pop();
      feat.cells.push_back(c);
      const int i = c % nx, j = c / nx;
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          const int ii = i + di, jj = j + dj;
          if (ii < 0 || ii >= nx || jj < 0 || jj >= ny) continue;
          const int cc = jj * nx + ii;
          if (!solid[cc] || out.label[cc] != 0) continue;
          out.label[cc] = feat.id;
          frontier.push(cc);
        }
      }
    }
    std::sort(feat.cells.begin(), feat.cells.end());
    out.features.push_back(std::move(feat));
  }
  return out;
}

DensityField remove_feature(const DensityField& design,
                            const FeatureLabeling& labeling, int id) {
  if (id < 1 || id > labeling.count()) {
    throw ConfigError("remove_feature: unknown feature id");
  }
  DensityField out = design;
  for (int c : labeling.features[static_cast<size_t>(id - 1)].cells) {
    out.xi[c] = 0.0;
  }
  return out;
}

AblationReport ablation_study(const DensityField& design,
                              const SimulationDomain& dom,
                              const SourceSpec& source,
                              const TargetSpec& targets, int threads) {
  // Features are delineated on the 0.5-thresholded mask, but every solve uses
  // the physical densities as-is: re-thresholding a converged design shifts
  // feature boundaries by up to a cell, which detunes its resonances and
  // would corrupt the baseline the deterioration is measured against.
  AblationReport report;
  report.labeling = label_features(design, dom);
  report.phi_base = physical_phi(design, dom, source, targets, threads).phi;
  if (report.phi_base <= 0.0) {
    throw NumericalError("ablation: baseline objective is zero; relative "
                         "deterioration is undefined");
  }

  for (const Feature& feat : report.labeling.features) {
    DensityField reduced = remove_feature(design, report.labeling, feat.id);
    double phi;
    try {
      phi = physical_phi(reduced, dom, source, targets, threads).phi;
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " (while removing feature " +
                           std::to_string(feat.id) + ")");
    }
    AblationRow row;
    row.feature_id = feat.id;
    row.area_cells = feat.area_cells();
    row.phi = phi;
    row.delta_phi_percent = 100.0 * (phi - report.phi_base) / report.phi_base;
    report.rows.push_back(row);
  }

  {
    DensityField empty = design;
    for (int c : dom.design_cells) empty.xi[c] = 0.0;
    const double phi = physical_phi(empty, dom, source, targets, threads).phi;
    report.all_removed = {-1, 0, phi,
                          100.0 * (phi - report.phi_base) / report.phi_base};
  }
  {
    const double phi = source_off_phi(dom, targets);
    report.source_off = {-2, 0, phi,
                         100.0 * (phi - report.phi_base) / report.phi_base};
  }
  return report;
}

void save_ablation_report(const AblationReport& report,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  char buf[128];
  out << "feature_id,area_cells,phi,delta_phi_percent\n";
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g\n", row.feature_id,
                  row.area_cells, row.phi, row.delta_phi_percent);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "ALL_REMOVED,0,%.17g,%.17g\n",
                report.all_removed.phi, report.all_removed.delta_phi_percent);
  out << buf;
  std::snprintf(buf, sizeof(buf), "SOURCE_OFF,0,%.17g,%.17g\n",
                report.source_off.phi, report.source_off.delta_phi_percent);
  out << buf;
  if (!out) throw IoError("error while writing " + path);
}

void write_feature_image(const FeatureLabeling& labeling, int nx, int ny,
                         const std::string& path) {
  std::vector<unsigned char> rgb(static_cast<size_t>(nx) * ny * 3, 0);
  const int n = std::max(1, labeling.count());
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int lab = labeling.label[static_cast<size_t>(j) * nx + i];
      if (lab == 0) continue;
      const auto col = hsv_to_rgb(360.0 * (lab - 1) / n, 0.9, 1.0);
      // image row 0 at the top
      const size_t off = (static_cast<size_t>(ny - 1 - j) * nx + i) * 3;
      rgb[off] = col[0];
      rgb[off + 1] = col[1];
      rgb[off + 2] = col[2];
    }
  }
  write_ppm(path, rgb, nx, ny);
}

}  // namespace scatopt
