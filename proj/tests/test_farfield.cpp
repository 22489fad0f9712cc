#include <doctest.h>

#include <cmath>
#include <fstream>

#include "scatopt/farfield.hpp"
#include "scatopt/io.hpp"
#include "test_util.hpp"

using namespace scatopt;

namespace {

std::vector<double> gaussian_column(const std::vector<double>& angles,
                                    double center, double sigma, double amp) {
  std::vector<double> col(angles.size());
  for (size_t k = 0; k < angles.size(); ++k) {
    const double d = angles[k] - center;
    col[k] = amp * std::exp(-d * d / (2 * sigma * sigma));
  }
  return col;
}

std::vector<double> degree_angles() {
  std::vector<double> a;
  for (int t = -90; t <= 90; ++t) a.push_back(t);
  return a;
}

}  // namespace

TEST_CASE("free-field monopole directivity is near-constant") {
  SimulationDomain dom = build_domain(tu::small_config());
  CoefficientFields coeffs = interpolate_material(DensityField::zeros(dom), dom);
  SourceSpec src{dom.source_i, dom.source_j, {1.0, 0.0}};
  AssembledSystem sys(dom, coeffs, src, 11000.0);
  PressureField p = solve(sys);
  std::vector<double> col = directivity(p, dom);
  double lo = 1e300, hi = 0.0;
  for (double v : col) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // |p|^2 across angles carries the stencil's axis/diagonal amplitude
  // anisotropy (a few percent in |p| at this resolution) on top of arc cell
  // quantization.
  CHECK((hi - lo) / hi < 0.15);
  CHECK(lo > 0.0);
}

TEST_CASE("mirror-symmetric problem gives an angle-reversed column") {
  SimulationDomain dom = build_domain(tu::symmetric_config());
  DensityField xi = DensityField::zeros(dom);
  // Mirror-symmetric design: solid band symmetric in y about the source row.
  for (int c : dom.design_cells) {
    const int j = c / dom.nx;
    if (std::abs(j - dom.source_j) <= 2) xi.xi[c] = 1.0;
  }
  CoefficientFields coeffs = interpolate_material(xi, dom);
  SourceSpec src{dom.source_i, dom.source_j, {1.0, 0.0}};
  AssembledSystem sys(dom, coeffs, src, 11000.0);
  PressureField p = solve(sys);
  std::vector<double> col = directivity(p, dom);
  const size_t n = col.size();
  for (size_t k = 0; k < n; ++k) {
    CHECK(std::abs(col[k] - col[n - 1 - k]) <= 1e-8 * col[k]);
  }
}

TEST_CASE("main lobe angle: delta pattern, tie rule, scaling invariance") {
  const std::vector<double> angles = degree_angles();
  std::vector<double> delta(angles.size(), 0.0);
  delta[35 + 90] = 1.0;
  CHECK(main_lobe_angle(delta, angles) == doctest::Approx(35.0));

  // Two equal peaks at +-20 degrees: the tie breaks toward -20.
  std::vector<double> twin(angles.size(), 0.0);
  twin[-20 + 90] = 1.0;
  twin[20 + 90] = 1.0;
  CHECK(main_lobe_angle(twin, angles) == doctest::Approx(-20.0));

  // Positive scaling leaves the argmax unchanged.
  std::vector<double> g = gaussian_column(angles, 12.3, 8.0, 1.0);
  const double base = main_lobe_angle(g, angles);
  for (double& v : g) v *= 7.25;
  CHECK(main_lobe_angle(g, angles) == doctest::Approx(base).epsilon(1e-12));
  CHECK(base == doctest::Approx(12.3).epsilon(0.01));
}

TEST_CASE("lobe ratio: no side lobe and calibrated two-Gaussian columns") {
  const std::vector<double> angles = degree_angles();
  std::vector<double> single = gaussian_column(angles, 0.0, 6.0, 1.0);
  CHECK(std::isinf(lobe_ratio_db(single)));

  // Peaks 1.0 and 0.01, well separated: 10*log10(1/0.01) = 20 dB.
  std::vector<double> two = gaussian_column(angles, -40.0, 4.0, 1.0);
  const std::vector<double> side = gaussian_column(angles, 50.0, 4.0, 0.01);
  for (size_t k = 0; k < two.size(); ++k) two[k] += side[k];
  CHECK(lobe_ratio_db(two) == doctest::Approx(20.0).epsilon(0.01));
}

TEST_CASE("FWHM interval brackets the half-maximum region") {
  const std::vector<double> angles = degree_angles();
  const double sigma = 10.0;
  std::vector<double> g = gaussian_column(angles, 0.0, sigma, 2.0);
  LobeInterval iv = fwhm_interval(g);
  const double fwhm_expected = 2.0 * std::sqrt(2.0 * std::log(2.0)) * sigma;
  const double width = angles[iv.hi] - angles[iv.lo];
  CHECK(width == doctest::Approx(fwhm_expected).epsilon(0.1));
  for (int k = iv.lo; k <= iv.hi; ++k) CHECK(g[k] >= 1.0);
}

TEST_CASE("lobe power fraction: delta, uniform half-span, bounds") {
  const std::vector<double> angles = degree_angles();
  std::vector<double> delta(angles.size(), 0.0);
  delta[90] = 1.0;
  CHECK(lobe_power_fraction(delta, fwhm_interval(delta)) == doctest::Approx(1.0));

  std::vector<double> uniform(180, 1.0);
  LobeInterval half{0, 89};
  CHECK(lobe_power_fraction(uniform, half) == doctest::Approx(0.5));

  std::vector<double> g = gaussian_column(angles, 10.0, 8.0, 1.0);
  const double frac = lobe_power_fraction(g, fwhm_interval(g));
  CHECK(frac >= 0.0);
  CHECK(frac <= 1.0);
}

TEST_CASE("radiation efficiency: identity and a blocking ring") {
  SimulationDomain dom = build_domain(tu::small_config());
  SourceSpec src{dom.source_i, dom.source_j, {1.0, 0.0}};
  const double f = 11000.0;
  const double free_power = analytic_monopole_power(f, dom.material, src.amplitude);

  CoefficientFields air = interpolate_material(DensityField::zeros(dom), dom);
  PressureField p_air = solve(AssembledSystem(dom, air, src, f));
  const double eff_empty = radiation_efficiency(
      radiated_power(p_air, dom, air, 0.045), free_power);
  CHECK(eff_empty == doctest::Approx(1.0).epsilon(0.02));

  // Full solid design block = closed ring around the source clearance disk.
  CoefficientFields ring =
      interpolate_material(DensityField::uniform(dom, 1.0), dom);
  PressureField p_ring = solve(AssembledSystem(dom, ring, src, f));
  const double eff_ring = radiation_efficiency(
      radiated_power(p_ring, dom, ring, 2.0 * dom.h), free_power);
  CHECK(eff_ring < 0.2);

  CHECK_THROWS_AS(radiation_efficiency(1.0, 0.0), ConfigError);
}

TEST_CASE("emission map columns match direct directivity and normalize to 1") {
  SimulationDomain dom = build_domain(tu::small_config());
  CoefficientFields coeffs = interpolate_material(DensityField::zeros(dom), dom);
  SourceSpec src{dom.source_i, dom.source_j, {1.0, 0.0}};

  SweepConfig sweep;
  sweep.f_min_hz = 9000.0;
  sweep.f_max_hz = 12000.0;
  sweep.samples = 5;
  sweep.extra_frequencies = {10123.0};
  sweep.normalize = false;
  DirectivityMap map = emission_map(dom, coeffs, src, sweep);
  REQUIRE(map.frequencies_hz.size() == 6);

  // Column at the injected design frequency equals a direct solve.
  size_t kf = 0;
  while (map.frequencies_hz[kf] != 10123.0) ++kf;
  PressureField p = solve(AssembledSystem(dom, coeffs, src, 10123.0));
  std::vector<double> col = directivity(p, dom);
  for (size_t s = 0; s < col.size(); ++s) {
    CHECK(map.power(static_cast<Eigen::Index>(s),
                    static_cast<Eigen::Index>(kf)) ==
          doctest::Approx(col[s]).epsilon(1e-12));
  }

  // Empty design: every column is angle-uniform up to the stencil anisotropy
  // and arc quantization.
  for (Eigen::Index c = 0; c < map.power.cols(); ++c) {
    const double mx = map.power.col(c).maxCoeff();
    const double mn = map.power.col(c).minCoeff();
    CHECK((mx - mn) / mx < 0.15);
  }

  normalize_per_frequency(map);
  CHECK(map.normalized);
  for (Eigen::Index c = 0; c < map.power.cols(); ++c) {
    CHECK(map.power.col(c).maxCoeff() == 1.0);
  }
}

TEST_CASE("directivity map save/load round trip") {
  DirectivityMap map;
  map.angles_deg = {-90, -45, 0, 45, 90};
  map.frequencies_hz = {8000, 10000, 12000};
  map.power.resize(5, 3);
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 3; ++c) map.power(r, c) = tu::urand();
  }
  map.normalized = false;
  const std::string path = tu::temp_path("dirmap.csv");
  save_directivity_map(map, path);
  DirectivityMap got = load_directivity_map(path);
  CHECK(got.angles_deg == map.angles_deg);
  CHECK(got.frequencies_hz == map.frequencies_hz);
  CHECK(got.normalized == map.normalized);
  CHECK((got.power - map.power).norm() == 0.0);
}

TEST_CASE("rainbow image: zero power is black, single frequency is single-hue") {
  DirectivityMap map;
  map.angles_deg = degree_angles();
  map.frequencies_hz = {10000.0};
  map.power = Eigen::MatrixXd::Zero(181, 1);
  map.normalized = true;

  const std::string path = tu::temp_path("rainbow_black.ppm");
  write_rainbow_image(map, path, 64);
  {
    std::ifstream in(path, std::ios::binary);
    std::string magic;
    int w, h, maxv;
    in >> magic >> w >> h >> maxv;
    REQUIRE(magic == "P6");
    CHECK(w == 64);
    CHECK(h == 64);
    in.get();
    std::vector<unsigned char> pix(64 * 64 * 3);
    in.read(reinterpret_cast<char*>(pix.data()), pix.size());
    for (unsigned char b : pix) CHECK(b == 0);
  }

  // One frequency at the low band edge maps to hue 0 (pure red).
  map.power = Eigen::MatrixXd::Ones(181, 1);
  const std::string path2 = tu::temp_path("rainbow_red.ppm");
  write_rainbow_image(map, path2, 64);
  {
    std::ifstream in(path2, std::ios::binary);
    std::string magic;
    int w, h, maxv;
    in >> magic >> w >> h >> maxv;
    in.get();
    std::vector<unsigned char> pix(64 * 64 * 3);
    in.read(reinterpret_cast<char*>(pix.data()), pix.size());
    int lit = 0;
    for (size_t k = 0; k < pix.size(); k += 3) {
      if (pix[k] || pix[k + 1] || pix[k + 2]) {
        ++lit;
        CHECK(pix[k] == 255);
        CHECK(pix[k + 1] == 0);
        CHECK(pix[k + 2] == 0);
      }
    }
    CHECK(lit > 0);
  }
}
