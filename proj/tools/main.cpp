#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "scatopt/ablation.hpp"
#include "scatopt/config.hpp"
#include "scatopt/design_loop.hpp"
#include "scatopt/farfield.hpp"
#include "scatopt/io.hpp"

namespace fs = std::filesystem;
using namespace scatopt;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int threads = 0;  // 0 -> unset
  bool deterministic = false;
};

int resolve_threads(const CommonArgs& args, const RunConfig& cfg) {
  if (args.threads > 0) return args.threads;
  if (const char* env = std::getenv("SCATOPT_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return cfg.threads;
}

RunConfig load_config_common(CommonArgs& args) {
  RunConfig cfg = load_run_config(args.config_path);
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  cfg.threads = resolve_threads(args, cfg);
  if (args.deterministic) cfg.deterministic = true;
  return cfg;
}

DensityFilter make_filter(const SimulationDomain& dom, const LoopConfig& lc) {
  const double radius =
      lc.filter_radius_m > 0 ? lc.filter_radius_m : 3.0 * dom.h;
  return DensityFilter(dom, radius);
}

void write_convergence_log(const std::string& path,
                           const std::vector<IterRecord>& history) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "iter,phi,max_gradient,beta\n";
  char buf[160];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof(buf), "%d,%.12e,%.12e,%.12e\n", r.iter, r.phi,
                  r.max_gradient, r.beta);
    out << buf;
  }
}

void write_polar_file(const std::string& path,
                      const std::vector<double>& angles,
                      const std::vector<double>& column) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "theta_deg,normalized_power\n";
  double mx = 0;
  for (double v : column) mx = std::max(mx, v);
  char buf[96];
  for (size_t s = 0; s < column.size(); ++s) {
    std::snprintf(buf, sizeof(buf), "%.12e,%.12e\n", angles[s],
                  mx > 0 ? column[s] / mx : 0.0);
    out << buf;
  }
}

std::string freq_file_name(const char* stem, double f_hz, const char* ext) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%s_f%ld.%s", stem, std::lround(f_hz), ext);
  return buf;
}

int cmd_design(CommonArgs args, const std::string& resume_prefix) {
  RunConfig cfg = load_config_common(args);
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(cfg.output_dir);

  SimulationDomain dom = build_domain(cfg.domain);
  SourceSpec src = make_source(cfg, dom);
  std::string target_log;
  TargetSpec targets = build_targets(cfg, dom, src, &target_log);
  if (!target_log.empty()) std::cerr << target_log;
  DensityFilter filter = make_filter(dom, cfg.optimizer);

  LoopConfig lc = cfg.optimizer;
  lc.threads = cfg.threads;
  if (lc.checkpoint_every > 0 && lc.checkpoint_prefix.empty()) {
    lc.checkpoint_prefix = (fs::path(cfg.output_dir) / "checkpoint").string();
  }

  std::optional<Checkpoint> resume;
  if (!resume_prefix.empty()) resume = load_checkpoint(resume_prefix);

  DesignResult result =
      run_design(dom, filter, src, targets, lc,
                 resume ? &*resume : nullptr, [](const IterRecord& r) {
                   std::fprintf(stderr, "iter %4d  phi %.6e  beta %g\n", r.iter,
                                r.phi, r.beta);
                 });

  const fs::path out(cfg.output_dir);
  write_convergence_log((out / "convergence.csv").string(), result.history);
  write_matrix((out / "blueprint.txt").string(), result.xi_physical.xi, dom.nx,
               dom.ny);
  write_matrix((out / "design_raw.txt").string(), result.xi.xi, dom.nx, dom.ny);
  write_pgm((out / "blueprint.pgm").string(), result.xi_physical.xi, dom.nx,
            dom.ny);

  {
    std::ofstream js((out / "summary.json").string());
    if (!js) throw IoError("cannot write summary.json");
    char buf[64];
    js << "{\n";
    std::snprintf(buf, sizeof(buf), "%.17g", result.objective.phi);
    js << "  \"phi\": " << buf << ",\n";
    js << "  \"per_frequency_phi\": [";
    for (size_t k = 0; k < result.objective.per_frequency_phi.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g",
                    result.objective.per_frequency_phi[k]);
      js << (k ? ", " : "") << buf;
    }
    js << "],\n  \"frequencies_hz\": [";
    for (size_t k = 0; k < result.objective.frequencies.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g",
                    result.objective.frequencies[k]);
      js << (k ? ", " : "") << buf;
    }
    js << "],\n  \"iterations\": " << result.history.size();
    if (!cfg.deterministic) {
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      std::snprintf(buf, sizeof(buf), "%.3f", wall);
      js << ",\n  \"wall_time_s\": " << buf;
    }
    js << "\n}\n";
  }
  std::fprintf(stderr, "final phi %.6e -> %s\n", result.objective.phi,
               cfg.output_dir.c_str());
  return 0;
}

int cmd_simulate(CommonArgs args, const std::string& blueprint_path,
                 int sweep_n) {
  RunConfig cfg = load_config_common(args);
  fs::create_directories(cfg.output_dir);
  SimulationDomain dom = build_domain(cfg.domain);
  SourceSpec src = make_source(cfg, dom);
  TargetSpec targets = build_targets(cfg, dom, src);

  DensityField design;
  design.xi = read_matrix(blueprint_path, &design.nx, &design.ny);
  if (design.nx != dom.nx || design.ny != dom.ny) {
    throw ConfigError("simulate: blueprint shape does not match the domain");
  }
  const CoefficientFields coeffs = interpolate_material(design, dom);

  SweepConfig sweep;
  sweep.f_min_hz = targets.f_min_hz;
  sweep.f_max_hz = targets.f_max_hz;
  sweep.samples = sweep_n > 0 ? sweep_n : cfg.sweep_samples;
  sweep.extra_frequencies = targets.frequencies();
  sweep.threads = cfg.threads;
  DirectivityMap map = emission_map(dom, coeffs, src, sweep);

  const fs::path out(cfg.output_dir);
  save_directivity_map(map, (out / "directivity_map.csv").string());

  // Pressure fields and polar cuts at the design frequencies.
  for (const auto& col : targets.columns) {
    AssembledSystem sys(dom, coeffs, src, col.f_hz);
    PressureField p = solve(sys);
    write_complex_matrix(
        (out / freq_file_name("pressure", col.f_hz, "txt")).string(), p.p,
        dom.nx, dom.ny);
    write_polar_file((out / freq_file_name("polar", col.f_hz, "csv")).string(),
                     [&] {
                       std::vector<double> a;
                       for (const auto& s : dom.target_arc)
                         a.push_back(s.theta_deg);
                       return a;
                     }(),
                     directivity(p, dom));
  }
  std::fprintf(stderr, "directivity map: %zu angles x %zu frequencies -> %s\n",
               map.angles_deg.size(), map.frequencies_hz.size(),
               cfg.output_dir.c_str());
  return 0;
}

int cmd_ablate(CommonArgs args, const std::string& blueprint_path) {
  RunConfig cfg = load_config_common(args);
  fs::create_directories(cfg.output_dir);
  SimulationDomain dom = build_domain(cfg.domain);
  SourceSpec src = make_source(cfg, dom);
  TargetSpec targets = build_targets(cfg, dom, src);

  DensityField design;
  design.xi = read_matrix(blueprint_path, &design.nx, &design.ny);
  if (design.nx != dom.nx || design.ny != dom.ny) {
    throw ConfigError("ablate: blueprint shape does not match the domain");
  }

  AblationReport report =
      ablation_study(design, dom, src, targets, cfg.threads);
  const fs::path out(cfg.output_dir);
  save_ablation_report(report, (out / "ablation_report.csv").string());
  write_feature_image(report.labeling, dom.nx, dom.ny,
                      (out / "features.ppm").string());
  std::fprintf(stderr, "%d features, base phi %.6e -> %s\n",
               report.labeling.count(), report.phi_base,
               cfg.output_dir.c_str());
  return 0;
}

int cmd_rainbow_plot(const std::string& map_path, const std::string& out_path,
                     int size_px) {
  DirectivityMap map = load_directivity_map(map_path);
  if (!map.normalized) normalize_per_frequency(map);
  write_rainbow_image(map, out_path, size_px);
  return 0;
}

int cmd_validate(CommonArgs args) {
  RunConfig cfg = load_config_common(args);
  SimulationDomain dom = build_domain(cfg.domain);
  SourceSpec src = make_source(cfg, dom);

  const DensityField empty = DensityField::zeros(dom);
  const CoefficientFields coeffs = interpolate_material(empty, dom);
  const double f = dom.f_max_hz;
  AssembledSystem sys(dom, coeffs, src, f);
  PressureField p = solve(sys);

  const double k = 2.0 * M_PI * f / dom.material.c_air;
  double num = 0.0, den = 0.0;
  for (int j = 0; j < dom.ny; ++j) {
    for (int i = 0; i < dom.nx; ++i) {
      if (dom.in_pml(i, j)) continue;
      const double dx = (i - dom.source_i) * dom.h;
      const double dy = (j - dom.source_j) * dom.h;
      const double r = std::hypot(dx, dy);
      if (k * r <= 2.0) continue;
      const double ana =
          std::abs(analytic_monopole_2d(f, r, dom.material, src.amplitude));
      const double err = std::abs(p.p[dom.idx(i, j)]) - ana;
      num += err * err;
      den += ana * ana;
    }
  }
  const double l2 = std::sqrt(num / den);

  double arc_dev = 0.0;
  for (const auto& s : dom.target_arc) {
    const int i = s.cell % dom.nx, j = s.cell / dom.nx;
    const double r =
        std::hypot((i - dom.source_i) * dom.h, (j - dom.source_j) * dom.h);
    const double ana =
        std::abs(analytic_monopole_2d(f, r, dom.material, src.amplitude));
    arc_dev = std::max(arc_dev,
                       std::abs(std::abs(p.p[s.cell]) - ana) / ana);
  }
  std::printf("field_l2_error %.6e (limit 0.02)\n", l2);
  std::printf("arc_max_deviation %.6e (limit 0.01)\n", arc_dev);
  const bool ok = l2 < 0.02 && arc_dev < 0.01;
  std::printf("validate %s\n", ok ? "PASS" : "FAIL");
  if (!ok) throw NumericalError("validate: solver accuracy out of bounds");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse design of passive acoustic scattering structures"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string resume_prefix, blueprint, map_path, image_out = "rainbow.ppm";
  int sweep_n = 0, size_px = 512;

  auto add_common = [&](CLI::App* sub, bool needs_config = true) {
    auto* opt = sub->add_option("--config", args.config_path, "run configuration (JSON)");
    if (needs_config) opt->required();
    sub->add_option("--out", args.out_dir, "output directory override");
    sub->add_option("--threads", args.threads, "worker pool size");
    sub->add_flag("--deterministic", args.deterministic,
                  "byte-reproducible outputs (omit wall time)");
  };

  auto* design = app.add_subcommand("design", "run the topology optimization");
  add_common(design);
  design->add_option("--resume", resume_prefix,
                     "checkpoint prefix to resume from");

  auto* simulate =
      app.add_subcommand("simulate", "frequency sweep of a fixed blueprint");
  add_common(simulate);
  simulate->add_option("--blueprint", blueprint, "density matrix file")
      ->required();
  simulate->add_option("--sweep-n", sweep_n, "sweep sample count");

  auto* ablate = app.add_subcommand("ablate", "feature-removal study");
  add_common(ablate);
  ablate->add_option("--blueprint", blueprint, "density matrix file")
      ->required();

  auto* plot = app.add_subcommand("rainbow-plot",
                                  "polar color image of a directivity map");
  plot->add_option("--map", map_path, "directivity map CSV")->required();
  plot->add_option("--out", image_out, "output image (PPM)");
  plot->add_option("--size", size_px, "image size in pixels");

  auto* validate =
      app.add_subcommand("validate", "solver-vs-analytic accuracy check");
  add_common(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (design->parsed()) return cmd_design(args, resume_prefix);
    if (simulate->parsed()) return cmd_simulate(args, blueprint, sweep_n);
    if (ablate->parsed()) return cmd_ablate(args, blueprint);
    if (plot->parsed()) return cmd_rainbow_plot(map_path, image_out, size_px);
    if (validate->parsed()) return cmd_validate(args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
