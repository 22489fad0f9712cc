#pragma once

#include <string>
#include <vector>

#include "scatopt/objective.hpp"

namespace scatopt {

struct Feature {
  int id = 0;               // contiguous from 1
  std::vector<int> cells;   // raster-ordered grid cells
  int area_cells() const { return static_cast<int>(cells.size()); }
};

struct FeatureLabeling {
  std::vector<int> label;  // per grid cell; 0 = void
  std::vector<Feature> features;
  int count() const { return static_cast<int>(features.size()); }
};

/// Thresholds the density field at 0.5 and labels 8-connected solid
/// components. Label order follows the raster position of each component's
/// first cell.
FeatureLabeling label_features(const DensityField& design,
                               const SimulationDomain& dom);

/// Returns the design with all cells of feature `id` set to air.
DensityField remove_feature(const DensityField& design,
                            const FeatureLabeling& labeling, int id);

struct AblationRow {
  int feature_id = 0;
  int area_cells = 0;
  double phi = 0.0;
  double delta_phi_percent = 0.0;
};

struct AblationReport {
  double phi_base = 0.0;
  std::vector<AblationRow> rows;     // one per feature
  AblationRow all_removed;           // feature_id = -1
  AblationRow source_off;            // feature_id = -2
  FeatureLabeling labeling;
};

/// Removes the features one by one, re-solving every design frequency, and
/// reports the relative deterioration of the objective. Features are labeled
/// on the 0.5-thresholded mask; the solves use the physical densities as
/// given, without further filtering or projection.
AblationReport ablation_study(const DensityField& design,
                              const SimulationDomain& dom,
                              const SourceSpec& source,
                              const TargetSpec& targets, int threads = 1);

/// CSV rows (feature_id, area_cells, phi, delta_phi_percent) plus the
/// ALL_REMOVED and SOURCE_OFF baseline rows.
void save_ablation_report(const AblationReport& report,
                          const std::string& path);

/// One hue per feature, void black.
void write_feature_image(const FeatureLabeling& labeling, int nx, int ny,
                         const std::string& path);

}  // namespace scatopt
