#include "scatopt/config.hpp"

#include <fstream>

#include <json.hpp>

namespace scatopt {

namespace {
using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config: " + where + ": " + what);
}

double need_number(const json& j, const std::string& section,
                   const std::string& key) {
  if (!j.contains(key)) fail(section, "missing key '" + key + "'");
  if (!j[key].is_number()) fail(section, "key '" + key + "' must be a number");
  return j[key].get<double>();
}

double opt_number(const json& j, const std::string& section,
                  const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) fail(section, "key '" + key + "' must be a number");
  return j[key].get<double>();
}

std::string opt_string(const json& j, const std::string& section,
                       const std::string& key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) fail(section, "key '" + key + "' must be a string");
  return j[key].get<std::string>();
}
}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + path + ": " + e.what());
  }

  RunConfig cfg;

  if (!root.contains("domain")) fail("domain", "section is missing");
  {
    const json& d = root["domain"];
    if (!d.contains("size_m") || !d["size_m"].is_array() ||
        d["size_m"].size() != 2) {
      fail("domain", "'size_m' must be an array [width, height]");
    }
    cfg.domain.width_m = d["size_m"][0].get<double>();
    cfg.domain.height_m = d["size_m"][1].get<double>();
    if (!d.contains("source_xy_m") || !d["source_xy_m"].is_array() ||
        d["source_xy_m"].size() != 2) {
      fail("domain", "'source_xy_m' must be an array [x, y]");
    }
    cfg.domain.source_x_m = d["source_xy_m"][0].get<double>();
    cfg.domain.source_y_m = d["source_xy_m"][1].get<double>();
    cfg.domain.design_size_m = need_number(d, "domain", "design_size_m");
    cfg.domain.f_max_hz = need_number(d, "domain", "f_max_hz");
    cfg.domain.resolution_ppw = opt_number(d, "domain", "resolution_ppw", 10.0);
    cfg.domain.target_radius_m = need_number(d, "domain", "target_radius_m");
    cfg.domain.target_span_deg =
        opt_number(d, "domain", "target_span_deg", 180.0);
    cfg.domain.target_samples =
        static_cast<int>(opt_number(d, "domain", "target_samples", 0));
    cfg.domain.pml_cells =
        static_cast<int>(opt_number(d, "domain", "pml_cells", 20));
    cfg.domain.source_clearance_m =
        opt_number(d, "domain", "source_clearance_m", 0.0);
  }

  if (root.contains("material")) {
    const json& m = root["material"];
    MaterialModel& mat = cfg.domain.material;
    mat.rho_air = opt_number(m, "material", "rho_air", mat.rho_air);
    mat.c_air = opt_number(m, "material", "c_air", mat.c_air);
    mat.rho_solid = opt_number(m, "material", "rho_solid", mat.rho_solid);
    mat.c_solid = opt_number(m, "material", "c_solid", mat.c_solid);
  }

  if (!root.contains("target")) fail("target", "section is missing");
  {
    const json& t = root["target"];
    const std::string kind = opt_string(t, "target", "kind", "");
    if (kind == "rainbow") {
      cfg.target.kind = TargetKind::kRainbow;
      cfg.target.f_min_hz = need_number(t, "target", "f_min_hz");
      cfg.target.f_max_hz = need_number(t, "target", "f_max_hz");
      cfg.target.num_frequencies =
          static_cast<int>(opt_number(t, "target", "num_frequencies", 8));
      cfg.target.angle_min_deg = need_number(t, "target", "angle_min_deg");
      cfg.target.angle_max_deg = need_number(t, "target", "angle_max_deg");
    } else if (kind == "splitter") {
      cfg.target.kind = TargetKind::kSplitter;
      cfg.target.band_lo_min_hz = need_number(t, "target", "band_lo_min_hz");
      cfg.target.band_lo_max_hz = need_number(t, "target", "band_lo_max_hz");
      cfg.target.band_lo_angle_deg =
          need_number(t, "target", "band_lo_angle_deg");
      cfg.target.band_hi_min_hz = need_number(t, "target", "band_hi_min_hz");
      cfg.target.band_hi_max_hz = need_number(t, "target", "band_hi_max_hz");
      cfg.target.band_hi_angle_deg =
          need_number(t, "target", "band_hi_angle_deg");
      cfg.target.num_per_band =
          static_cast<int>(opt_number(t, "target", "num_per_band", 4));
    } else if (kind == "custom") {
      cfg.target.kind = TargetKind::kCustom;
      cfg.target.file = opt_string(t, "target", "file", "");
      if (cfg.target.file.empty()) fail("target", "custom targets need 'file'");
      if (!t.contains("frequencies") || !t["frequencies"].is_array() ||
          t["frequencies"].empty()) {
        fail("target", "custom targets need a 'frequencies' array");
      }
      for (const auto& f : t["frequencies"]) {
        cfg.target.frequencies.push_back(f.get<double>());
      }
    } else {
      fail("target", "'kind' must be one of rainbow|splitter|custom");
    }
    cfg.target.lobe.fwhm_deg = opt_number(t, "target", "lobe_fwhm_deg", 20.0);
    cfg.target.lobe.gain = opt_number(t, "target", "gain", 1.2);
    cfg.target.lobe.exponent = opt_number(t, "target", "lobe_exponent", 2.0);
  }

  if (root.contains("optimizer")) {
    const json& o = root["optimizer"];
    LoopConfig& lc = cfg.optimizer;
    lc.max_iters = static_cast<int>(opt_number(o, "optimizer", "max_iters",
                                               lc.max_iters));
    lc.beta_init = opt_number(o, "optimizer", "beta_init", lc.beta_init);
    lc.beta_mult = opt_number(o, "optimizer", "beta_mult", lc.beta_mult);
    lc.beta_max = opt_number(o, "optimizer", "beta_max", lc.beta_max);
    lc.beta_period = static_cast<int>(
        opt_number(o, "optimizer", "beta_period", lc.beta_period));
    lc.tol_dx = opt_number(o, "optimizer", "tol_dx", lc.tol_dx);
    lc.eta = opt_number(o, "optimizer", "eta", lc.eta);
    lc.filter_radius_m =
        opt_number(o, "optimizer", "filter_radius_m", lc.filter_radius_m);
    lc.move_limit = opt_number(o, "optimizer", "move_limit", lc.move_limit);
    lc.initial_density =
        opt_number(o, "optimizer", "initial_density", lc.initial_density);
    lc.checkpoint_every = static_cast<int>(
        opt_number(o, "optimizer", "checkpoint_every", lc.checkpoint_every));
    if (o.contains("volume_fraction")) {
      lc.volume_fraction = need_number(o, "optimizer", "volume_fraction");
    }
  }

  cfg.output_dir = opt_string(root, "top level", "output_dir", cfg.output_dir);
  cfg.threads =
      static_cast<int>(opt_number(root, "top level", "threads", cfg.threads));
  if (root.contains("deterministic")) {
    if (!root["deterministic"].is_boolean()) {
      fail("top level", "'deterministic' must be a boolean");
    }
    cfg.deterministic = root["deterministic"].get<bool>();
  }
  cfg.sweep_samples = static_cast<int>(
      opt_number(root, "top level", "sweep_samples", cfg.sweep_samples));
  cfg.source_amplitude =
      Complex(opt_number(root, "top level", "source_amplitude", 1.0), 0.0);
  if (cfg.threads < 1) fail("top level", "'threads' must be >= 1");
  return cfg;
}

SourceSpec make_source(const RunConfig& cfg, const SimulationDomain& dom) {
  SourceSpec src;
  src.i = dom.source_i;
  src.j = dom.source_j;
  src.amplitude = cfg.source_amplitude;
  return src;
}

TargetSpec build_targets(const RunConfig& cfg, const SimulationDomain& dom,
                         const SourceSpec& src, std::string* log) {
  switch (cfg.target.kind) {
    case TargetKind::kRainbow:
      return rainbow_target(dom, src, cfg.target.f_min_hz, cfg.target.f_max_hz,
                            cfg.target.num_frequencies,
                            cfg.target.angle_min_deg, cfg.target.angle_max_deg,
                            cfg.target.lobe);
    case TargetKind::kSplitter:
      return splitter_target(
          dom, src, cfg.target.band_lo_min_hz, cfg.target.band_lo_max_hz,
          cfg.target.band_lo_angle_deg, cfg.target.band_hi_min_hz,
          cfg.target.band_hi_max_hz, cfg.target.band_hi_angle_deg,
          cfg.target.num_per_band, cfg.target.lobe);
    case TargetKind::kCustom:
      return load_custom_target(cfg.target.file, dom, cfg.target.frequencies,
                                log);
  }
  throw ConfigError("config: target: unknown kind");
}

}  // namespace scatopt
