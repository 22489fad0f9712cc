#include <doctest.h>

#include <fstream>
#include <set>

#include "scatopt/ablation.hpp"
#include "scatopt/targets.hpp"
#include "test_util.hpp"

using namespace scatopt;

namespace {

SimulationDomain make_dom() {
  // Wider interior so the design annulus is a few cells thick.
  scatopt::DomainConfig c = tu::small_config();
  c.width_m = 0.16;
  c.height_m = 0.16;
  c.source_x_m = 0.08;
  c.source_y_m = 0.08;
  c.design_size_m = 0.045;
  c.target_radius_m = 0.065;
  return build_domain(c);
}

void paint_square(DensityField& d, const SimulationDomain& dom, int ci, int cj,
                  int half) {
  for (int j = cj - half; j <= cj + half; ++j) {
    for (int i = ci - half; i <= ci + half; ++i) {
      const int c = dom.idx(i, j);
      if (dom.design_mask[c]) d.xi[c] = 1.0;
    }
  }
}

// Independent recursive flood fill with 8-connectivity.
int oracle_count(const DensityField& d, const SimulationDomain& dom) {
  std::vector<char> seen(dom.cells(), 0);
  int count = 0;
  for (int start = 0; start < dom.cells(); ++start) {
    if (seen[start] || d.xi[start] < 0.5) continue;
    ++count;
    std::vector<int> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      const int i = c % dom.nx, j = c / dom.nx;
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          const int ii = i + di, jj = j + dj;
          if (ii < 0 || ii >= dom.nx || jj < 0 || jj >= dom.ny) continue;
          const int cc = dom.idx(ii, jj);
          if (!seen[cc] && d.xi[cc] >= 0.5) {
            seen[cc] = 1;
            stack.push_back(cc);
          }
        }
      }
    }
  }
  return count;
}

}  // namespace

TEST_CASE("one solid square is one feature") {
  SimulationDomain dom = make_dom();
  DensityField d = DensityField::zeros(dom);
  paint_square(d, dom, dom.source_i + 6, dom.source_j, 1);
  FeatureLabeling lab = label_features(d, dom);
  CHECK(lab.count() == 1);
  CHECK(lab.features[0].id == 1);
  CHECK(lab.features[0].area_cells() == 9);
}

TEST_CASE("diagonal contact merges features under 8-connectivity") {
  SimulationDomain dom = make_dom();
  DensityField d = DensityField::zeros(dom);
  const int i0 = dom.source_i + 6, j0 = dom.source_j + 2;
  d.xi[dom.idx(i0, j0)] = 1.0;
  d.xi[dom.idx(i0 + 1, j0 + 1)] = 1.0;  // touches only diagonally
  REQUIRE(dom.design_mask[dom.idx(i0, j0)] == 1);
  REQUIRE(dom.design_mask[dom.idx(i0 + 1, j0 + 1)] == 1);
  REQUIRE(dom.design_mask[dom.idx(i0, j0 - 4)] == 1);
  CHECK(label_features(d, dom).count() == 1);

  d.xi[dom.idx(i0 + 1, j0 + 1)] = 0.0;
  d.xi[dom.idx(i0, j0 - 4)] = 1.0;  // fully separated
  CHECK(label_features(d, dom).count() == 2);
}

TEST_CASE("random binary designs match the flood-fill oracle") {
  SimulationDomain dom = make_dom();
  for (int trial = 0; trial < 5; ++trial) {
    DensityField d = DensityField::zeros(dom);
    for (int c : dom.design_cells) d.xi[c] = tu::urand() < 0.35 ? 1.0 : 0.0;
    FeatureLabeling lab = label_features(d, dom);
    CHECK(lab.count() == oracle_count(d, dom));

    // Labels partition the solid cells and are contiguous from 1.
    std::set<int> seen_cells;
    for (int k = 0; k < lab.count(); ++k) {
      CHECK(lab.features[k].id == k + 1);
      for (int c : lab.features[k].cells) {
        CHECK(d.xi[c] >= 0.5);
        CHECK(seen_cells.insert(c).second);
        CHECK(lab.label[c] == k + 1);
      }
    }
    int solid = 0, area_sum = 0;
    for (int c : dom.design_cells) solid += d.xi[c] >= 0.5 ? 1 : 0;
    for (const auto& f : lab.features) area_sum += f.area_cells();
    CHECK(area_sum == solid);
  }
}

TEST_CASE("fully void design yields zero features") {
  SimulationDomain dom = make_dom();
  CHECK(label_features(DensityField::zeros(dom), dom).count() == 0);
}

TEST_CASE("remove_feature removes exactly the named cells and is idempotent") {
  SimulationDomain dom = make_dom();
  DensityField d = DensityField::zeros(dom);
  paint_square(d, dom, dom.source_i + 6, dom.source_j + 2, 1);
  paint_square(d, dom, dom.source_i - 6, dom.source_j - 2, 1);
  FeatureLabeling lab = label_features(d, dom);
  REQUIRE(lab.count() == 2);

  const double before = d.xi.sum();
  DensityField once = remove_feature(d, lab, 1);
  CHECK(before - once.xi.sum() == doctest::Approx(lab.features[0].area_cells()));
  DensityField twice = remove_feature(once, lab, 1);
  CHECK((twice.xi - once.xi).norm() == 0.0);

  DensityField none = remove_feature(once, lab, 2);
  CHECK(none.xi.sum() == 0.0);

  CHECK_THROWS_AS(remove_feature(d, lab, 3), ConfigError);
}

TEST_CASE("ablation study reports per-feature rows plus both baselines") {
  SimulationDomain dom = make_dom();
  SourceSpec src{dom.source_i, dom.source_j, {1.0, 0.0}};
  TargetSpec targets =
      rainbow_target(dom, src, 10000.0, 12000.0, 1, -20.0, 20.0, LobeShape{});

  DensityField d = DensityField::zeros(dom);
  paint_square(d, dom, dom.source_i + 6, dom.source_j + 3, 1);
  paint_square(d, dom, dom.source_i - 6, dom.source_j - 3, 1);

  AblationReport rep = ablation_study(d, dom, src, targets, 1);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.phi_base > 0.0);
  for (const auto& row : rep.rows) {
    CHECK(row.phi >= 0.0);
    CHECK(row.delta_phi_percent ==
          doctest::Approx(100.0 * (row.phi - rep.phi_base) / rep.phi_base)
              .epsilon(1e-12));
  }
  CHECK(rep.all_removed.feature_id == -1);
  CHECK(rep.source_off.feature_id == -2);
  CHECK(std::isfinite(rep.all_removed.delta_phi_percent));
  CHECK(std::isfinite(rep.source_off.delta_phi_percent));

  // Rerunning the study is bit-identical (pure pipeline).
  AblationReport rep2 = ablation_study(d, dom, src, targets, 1);
  CHECK(rep2.phi_base == rep.phi_base);
  for (size_t k = 0; k < rep.rows.size(); ++k) {
    CHECK(rep2.rows[k].phi == rep.rows[k].phi);
  }

  const std::string path = tu::temp_path("ablation.csv");
  save_ablation_report(rep, path);
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("ALL_REMOVED") != std::string::npos);
  CHECK(text.find("SOURCE_OFF") != std::string::npos);
  CHECK(text.find("feature_id") != std::string::npos);
}

TEST_CASE("empty design produces baselines only") {
  SimulationDomain dom = make_dom();
  SourceSpec src{dom.source_i, dom.source_j, {1.0, 0.0}};
  TargetSpec targets =
      rainbow_target(dom, src, 10000.0, 12000.0, 1, -20.0, 20.0, LobeShape{});
  AblationReport rep =
      ablation_study(DensityField::zeros(dom), dom, src, targets, 1);
  CHECK(rep.rows.empty());
  CHECK(rep.all_removed.delta_phi_percent == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("feature image is written with one hue per feature") {
  SimulationDomain dom = make_dom();
  DensityField d = DensityField::zeros(dom);
  paint_square(d, dom, dom.source_i + 6, dom.source_j, 1);
  FeatureLabeling lab = label_features(d, dom);
  const std::string path = tu::temp_path("features.ppm");
  write_feature_image(lab, dom.nx, dom.ny, path);
  std::ifstream in(path, std::ios::binary);
  std::string magic;
  in >> magic;
  CHECK(magic == "P6");
}
