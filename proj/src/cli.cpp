#include "pwave/cli.hpp"

#include "cli_internal.hpp"
#include "pwave/exact.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <fmt/format.h>
#include <openssl/evp.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace pwave {

namespace {

constexpr const char* kVersion = "0.1.0";

// One entry per configuration key. The visitor receives (key, member, help).
template <class Config, class F>
void for_each_field(Config& c, F&& f) {
  f("crystal", c.crystal, "crystal kind: equilibrium | rings");
  f("case", c.trap_case, "trap parameters: A | B | custom");
  f("ions", c.ions, "ion count for equilibrium crystals");
  f("rings", c.rings, "ring count for ring crystals");
  f("ring_radius_m", c.ring_radius_m, "outer radius of ring crystals");
  f("rotation_freq_hz", c.rotation_freq_hz, "custom trap: rotation frequency");
  f("axial_freq_hz", c.axial_freq_hz, "custom trap: axial (c.m.) frequency");
  f("magnetic_field_t", c.magnetic_field_t, "custom trap: magnetic field");
  f("ion_mass_u", c.ion_mass_u, "ion mass in atomic mass units");
  f("layout_file", c.layout_file, "read the layout from this file");
  f("modes_file", c.modes_file, "read drumhead modes from this file");
  f("init", c.init, "initial texture: bcs | bec | domain_wall | raw");
  f("pulse_area_rad", c.pulse_area_rad, "init pulse area (negative: protocol default)");
  f("odf_waist_over_r", c.odf_waist_over_r, "init beam waist / R (0: flat, negative: default)");
  f("domain_radius_over_r", c.domain_radius_over_r, "domain-wall radius / R (negative: default)");
  f("texture_file", c.texture_file, "read the spin texture from this file");
  f("solver", c.solver, "mf | dtwa | exact");
  f("model", c.model, "1ch | 2ch");
  f("k_over_j", c.k_over_j, "one-channel dispersion K in units of J");
  f("b1_over_g", c.b1_over_g, "two-channel dispersion B1 in units of G");
  f("delta1_over_g", c.delta1_over_g, "two-channel detuning in units of G");
  f("offresonant", c.offresonant, "none, all, or a comma list of j12,j11,j5,shifts");
  f("step", c.step, "integration step (dimensionless time)");
  f("t_end", c.t_end, "final time (Jt, or Gt for two-channel)");
  f("output_every", c.output_every, "steps between samples");
  f("n_traj", c.n_traj, "dTWA trajectories");
  f("seed", c.seed, "master seed");
  f("threads", c.threads, "worker threads (0: all cores)");
  f("no_spin_noise", c.no_spin_noise, "dTWA: disable spin sampling");
  f("no_oscillator_noise", c.no_oscillator_noise, "dTWA: disable oscillator sampling");
  f("clamp_correlator", c.clamp_correlator, "clamp negative pair correlators instead of |.|");
  f("snapshot_times", c.snapshot_times, "times at which textures are saved");
  f("delta_ac_hz", c.delta_ac_hz, "ODF Stark-shift strength");
  f("eta1", c.eta1, "c.m. Lamb-Dicke target");
  f("eta_x", c.eta_x, "in-plane small parameter target");
  f("delta1_hz", c.delta1_hz, "c.m. detuning");
  f("raman_rabi_hz", c.raman_rabi_hz, "Raman Rabi frequency B0");
  f("b1_over_j", c.b1_over_j, "Raman waist chosen so that B1 = this * J");
  f("wavelength_m", c.wavelength_m, "ODF wavelength");
  f("spin_splitting_hz", c.spin_splitting_hz, "qubit splitting");
  f("raman_tilt_rad", c.raman_tilt_rad, "Raman beam angle to the crystal plane");
  f("gamma_odf_hz", c.gamma_odf_hz, "ODF scattering rate");
  f("gamma_raman_hz", c.gamma_raman_hz, "Raman scattering rate");
  f("doppler_radius_m", c.doppler_radius_m, "radius for the Doppler estimate (0: crystal radius)");
  f("timeseries_file", c.timeseries_file, "analyze: time series CSV for mu_infinity and phase");
  f("mu_window", c.mu_window, "analyze: final fraction used for mu_infinity");
  f("quick", c.quick, "reproduce-figure: reduced trajectories and durations");
  f("output_dir", c.output_dir, "output directory (default $PWAVE_OUTPUT_DIR or ./pwave_out)");
}

std::string dashed(std::string s) {
  for (auto& ch : s)
    if (ch == '_') ch = '-';
  return s;
}

template <class T>
struct IsBool : std::false_type {};
template <>
struct IsBool<bool> : std::true_type {};

std::string canonical_json(const RunConfig& cfg) { return cfg.to_json().dump(); }

std::string sha1_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha1(), nullptr))
    throw Error(ErrorCategory::kNumerical, "SHA-1 digest failed");
  std::string out;
  for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", md[i]);
  return out;
}

}  // namespace

void RunConfig::validate() const {
  std::vector<std::string> bad;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) bad.push_back(msg);
  };
  static const std::set<std::string> subs = {"crystal", "init",      "evolve",           "analyze",
                                             "params",  "rwa-table", "reproduce-figure"};
  need(subs.count(subcommand) > 0, "unknown subcommand '" + subcommand + "'");
  need(crystal == "equilibrium" || crystal == "rings", "crystal must be equilibrium or rings");
  need(trap_case == "A" || trap_case == "B" || trap_case == "custom", "case must be A, B or custom");
  need(ions >= 2, "ions must be >= 2");
  need(rings >= 1, "rings must be >= 1");
  need(ring_radius_m > 0.0, "ring_radius_m must be > 0");
  if (trap_case == "custom") {
    need(rotation_freq_hz > 0.0, "rotation_freq_hz must be > 0");
    need(axial_freq_hz > 0.0, "axial_freq_hz must be > 0");
    need(magnetic_field_t > 0.0, "magnetic_field_t must be > 0");
  }
  need(ion_mass_u > 0.0, "ion_mass_u must be > 0");
  for (const auto* f : {&layout_file, &modes_file, &texture_file, &timeseries_file})
    if (!f->empty()) need(std::filesystem::exists(*f), "input file '" + *f + "' does not exist");
  need(!(!modes_file.empty() && layout_file.empty()), "modes_file requires layout_file");
  try {
    parse_init_kind(init);
  } catch (const Error&) {
    bad.push_back("init must be bcs, bec, domain_wall or raw");
  }
  if (init == "raw") need(pulse_area_rad >= 0.0, "init raw needs pulse_area_rad >= 0");
  need(solver == "mf" || solver == "dtwa" || solver == "exact", "solver must be mf, dtwa or exact");
  need(model == "1ch" || model == "2ch", "model must be 1ch or 2ch");
  need(std::isfinite(k_over_j), "k_over_j must be finite");
  need(std::isfinite(b1_over_g) && std::isfinite(delta1_over_g), "b1_over_g and delta1_over_g must be finite");
  if (offresonant != "none" && offresonant != "all") {
    std::stringstream ss(offresonant);
    std::string item;
    while (std::getline(ss, item, ','))
      need(item == "j12" || item == "j11" || item == "j5" || item == "shifts",
           "unknown off-resonant term '" + item + "'");
  }
  if (offresonant != "none") {
    need(model == "1ch", "off-resonant terms need model 1ch");
    need(crystal == "equilibrium" || !modes_file.empty(), "off-resonant terms need drumhead modes");
    need(solver != "exact", "off-resonant terms are not available in the exact solver");
  }
  if (solver == "exact") {
    need(model == "1ch", "the exact solver covers the one-channel model only");
    need(crystal == "rings" && layout_file.empty(), "the exact solver needs a generated ring crystal");
  }
  need(step > 0.0, "step must be > 0");
  need(t_end >= 0.0, "t_end must be >= 0");
  need(output_every >= 1, "output_every must be >= 1");
  need(n_traj >= 1, "n_traj must be >= 1");
  for (double t : snapshot_times) need(t >= 0.0 && t <= t_end, fmt::format("snapshot time {} outside [0, t_end]", t));
  for (auto [v, name] : {std::pair{delta_ac_hz, "delta_ac_hz"}, {eta1, "eta1"}, {eta_x, "eta_x"},
                         {raman_rabi_hz, "raman_rabi_hz"}, {wavelength_m, "wavelength_m"},
                         {spin_splitting_hz, "spin_splitting_hz"}})
    need(v > 0.0, fmt::format("{} must be > 0", name));
  need(delta1_hz != 0.0, "delta1_hz must be nonzero");
  need(b1_over_j >= 0.0, "b1_over_j must be >= 0");
  need(raman_tilt_rad >= 0.0, "raman_tilt_rad must be >= 0");
  need(gamma_odf_hz >= 0.0 && gamma_raman_hz >= 0.0, "scattering rates must be >= 0");
  need(doppler_radius_m >= 0.0, "doppler_radius_m must be >= 0");
  need(mu_window > 0.0 && mu_window <= 1.0, "mu_window must be in (0, 1]");
  if (subcommand == "analyze") need(!texture_file.empty(), "analyze needs texture_file");
  if (subcommand == "reproduce-figure") need(figure >= 2 && figure <= 6, fmt::format("unsupported figure id {}", figure));
  if (bad.empty()) return;
  std::string msg = fmt::format("{} configuration error(s):", bad.size());
  for (const auto& b : bad) msg += "\n  - " + b;
  throw Error(ErrorCategory::kConfig, msg);
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["figure"] = figure;
  for_each_field(*this, [&](const char* key, const auto& v, const char*) { j[key] = v; });
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCategory::kConfig, "config must be a JSON object");
  RunConfig c;
  std::set<std::string> known = {"subcommand", "figure"};
  try {
    if (j.contains("subcommand")) j.at("subcommand").get_to(c.subcommand);
    if (j.contains("figure")) j.at("figure").get_to(c.figure);
    for_each_field(c, [&](const char* key, auto& v, const char*) {
      known.insert(key);
      if (j.contains(key)) j.at(key).get_to(v);
    });
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::kConfig, std::string("bad config value: ") + e.what());
  }
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw Error(ErrorCategory::kConfig, "unknown config key '" + key + "'");
  return c;
}

std::filesystem::path resolve_output_dir(const RunConfig& cfg) {
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv("PWAVE_OUTPUT_DIR"); env && *env) return env;
  return "pwave_out";
}

std::string config_hash(const RunConfig& cfg) {
  const std::string body = canonical_json(cfg);
  return sha1_hex("blob " + std::to_string(body.size()) + '\0' + body);
}

// ---------------------------------------------------------------------------

namespace detail {

TrapConfig make_trap(const RunConfig& cfg) {
  TrapConfig t;
  if (cfg.trap_case == "A") {
    t = TrapConfig::case_a(cfg.ions);
  } else if (cfg.trap_case == "B") {
    t = TrapConfig::case_b(cfg.ions);
  } else {
    t.rotation_freq = to_angular(cfg.rotation_freq_hz);
    t.axial_freq = to_angular(cfg.axial_freq_hz);
    t.ion_count = cfg.ions;
    t.label = "custom";
  }
  t.ion_mass = cfg.ion_mass_u * constants::atomic_mass_unit;
  t.cyclotron_freq = constants::elementary_charge * cfg.magnetic_field_t / t.ion_mass;
  t.validate();
  return t;
}

DesignTargets design_targets(const RunConfig& cfg) {
  DesignTargets d;
  d.eta1 = cfg.eta1;
  d.eta_x = cfg.eta_x;
  d.delta_ac = to_angular(cfg.delta_ac_hz);
  d.delta1 = to_angular(cfg.delta1_hz);
  d.raman_rabi = to_angular(cfg.raman_rabi_hz);
  d.b1_over_j = cfg.b1_over_j;
  d.wavenumber = kTwoPi / cfg.wavelength_m;
  d.spin_splitting = to_angular(cfg.spin_splitting_hz);
  d.raman_tilt = cfg.raman_tilt_rad;
  return d;
}

ScatteringRates scattering_rates(const RunConfig& cfg) {
  return {to_angular(cfg.gamma_odf_hz), to_angular(cfg.gamma_raman_hz)};
}

Geometry build_geometry(const RunConfig& cfg, bool with_modes) {
  Geometry g;
  g.trap = make_trap(cfg);
  if (!cfg.layout_file.empty()) {
    g.layout = load_layout(cfg.layout_file);
  } else if (cfg.crystal == "rings") {
    g.layout = make_ring_crystal(cfg.rings, cfg.ring_radius_m);
  } else {
    g.layout = equilibrate_crystal(g.trap);
  }
  const bool has_modes = !cfg.modes_file.empty() || (cfg.crystal == "equilibrium" && cfg.layout_file.empty());
  if (with_modes && has_modes) {
    g.beams = design_beams(g.trap, g.layout.radius, g.trap.axial_freq, design_targets(cfg));
    if (!cfg.modes_file.empty()) {
      g.modes = load_modes(cfg.modes_file);
      if (g.modes->size() != g.layout.size())
        throw Error(ErrorCategory::kValidation, "mode file does not match the layout");
    } else {
      g.modes = drumhead_modes(g.layout, g.trap, 2.0 * g.beams->wavenumber * std::sin(g.beams->tilt));
    }
    // tune against the computed c.m. frequency
    g.beams = design_beams(g.trap, g.layout.radius, g.modes->frequencies[0], design_targets(cfg));
  }
  return g;
}

InitProtocol init_protocol(const RunConfig& cfg) {
  InitProtocol p;
  switch (parse_init_kind(cfg.init)) {
    case InitKind::kBcs: p = InitProtocol::bcs(); break;
    case InitKind::kBec: p = InitProtocol::bec(); break;
    case InitKind::kDomainWall: p = InitProtocol::domain_wall(); break;
    case InitKind::kRawRotation: p.kind = InitKind::kRawRotation; break;
  }
  if (cfg.odf_waist_over_r == 0.0) p.waist = kInfinity;
  else if (cfg.odf_waist_over_r > 0.0) p.waist = cfg.odf_waist_over_r;
  if (cfg.pulse_area_rad >= 0.0) p.pulse_area = cfg.pulse_area_rad;
  if (cfg.domain_radius_over_r >= 0.0) p.domain_radius = cfg.domain_radius_over_r;
  p.validate();
  return p;
}

SpinConfiguration initial_state(const RunConfig& cfg, const CrystalLayout& layout) {
  if (!cfg.texture_file.empty()) return load_texture(cfg.texture_file, layout);
  return make_initial_state(layout, init_protocol(cfg));
}

EvolveConfig evolve_config(const RunConfig& cfg) {
  EvolveConfig e;
  e.step = cfg.step;
  e.t_end = cfg.t_end;
  e.output_every = cfg.output_every;
  e.n_traj = cfg.n_traj;
  e.seed = cfg.seed;
  e.threads = cfg.threads;
  e.sample_spins = !cfg.no_spin_noise;
  e.sample_oscillator = !cfg.no_oscillator_noise;
  e.clamp_negative_correlator = cfg.clamp_correlator;
  e.snapshot_times = cfg.snapshot_times;
  e.validate();
  return e;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCategory::kIo, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(ErrorCategory::kIo, "write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCategory::kIo, "cannot read " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

nlohmann::json manifest_base(const RunConfig& cfg) {
  nlohmann::json m;
  m["tool"] = "pwave";
  m["subcommand"] = cfg.subcommand;
  m["config"] = cfg.to_json();
  m["config_hash"] = config_hash(cfg);
  m["seed"] = cfg.seed;
  m["versions"] = {{"pwave", kVersion},
                   {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
                   {"compiler", __VERSION__}};
  m["artifacts"] = nlohmann::json::array();
  return m;
}

nlohmann::json diagnostics_json(const Diagnostics& d) {
  return {{"max_norm_drift", d.max_norm_drift},
          {"max_sz_drift", d.max_sz_drift},
          {"max_energy_drift", d.max_energy_drift},
          {"step_warning", d.step_warning},
          {"negative_correlator_samples", d.negative_correlator_samples}};
}

}  // namespace detail

namespace {

using namespace detail;
namespace fs = std::filesystem;

struct Output {
  fs::path dir;
  nlohmann::json manifest;

  void write(const std::string& name, const std::string& text) {
    write_text(dir / name, text);
    manifest["artifacts"].push_back(name);
  }
};

std::string texture_name(double t) { return fmt::format("texture_t{:.4f}.txt", t); }

// Minimal reader for the time-series CSV written by format_timeseries_csv.
TimeSeries read_timeseries_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  TimeSeries ts;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 || line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorCategory::kParse, fmt::format("{}:{}: bad number '{}'", path.string(), lineno, cell));
      }
    }
    if (v.size() != 8)
      throw Error(ErrorCategory::kParse, fmt::format("{}:{}: expected 8 columns", path.string(), lineno));
    ts.t.push_back(v[0]);
    ts.psi.emplace_back(v[1], v[2]);
    ts.psi_tilde.push_back(v[4]);
    ts.sz_total.push_back(v[5]);
    ts.energy.push_back(v[6]);
    ts.n_cm.push_back(v[7]);
  }
  return ts;
}

nlohmann::json budget_json(const RunConfig& cfg) {
  const auto t = design_targets(cfg);
  const double G = t.delta_ac * t.eta1 * t.eta_x / 4.0;
  const auto b = scattering_budget(to_angular(cfg.gamma_odf_hz), to_angular(cfg.gamma_raman_hz), G * G / t.delta1);
  nlohmann::json j = {{"gamma_tot_hz", to_hz(b.gamma_tot)}};
  if (b.unbounded()) j["jt_budget"] = "unbounded";
  else j["jt_budget"] = b.jt_budget;
  if (cfg.model == "1ch" && !b.unbounded()) j["run_exceeds_budget"] = cfg.t_end > b.jt_budget;
  return j;
}

void cmd_crystal(const RunConfig& cfg, Output& out) {
  auto g = build_geometry(cfg, true);
  out.write("layout.txt", format_layout(g.layout));
  if (g.modes) {
    save_modes(*g.modes, out.dir / "modes.txt");
    out.manifest["artifacts"].push_back("modes.txt");
  }
  out.write("triangulation.csv", format_triangulation_csv(delaunay(g.layout)));
  nlohmann::json s = {{"ions", g.layout.size()}, {"radius_m", g.layout.radius}};
  std::cout << fmt::format("crystal: {} ions, R = {:.3f} um\n", g.layout.size(), g.layout.radius * 1e6);
  if (g.modes) {
    const auto& w = g.modes->frequencies;
    s["omega_max_hz"] = to_hz(w.front());
    s["omega_min_hz"] = to_hz(w.back());
    std::cout << fmt::format("drumhead modes: {:.4f} .. {:.4f} MHz\n", to_hz(w.back()) * 1e-6, to_hz(w.front()) * 1e-6);
  }
  out.manifest["summary"] = s;
}

void cmd_init(const RunConfig& cfg, Output& out) {
  auto g = build_geometry(cfg, false);
  const auto s = initial_state(cfg, g.layout);
  out.write("layout.txt", format_layout(g.layout));
  save_texture(s, g.layout, out.dir / "texture.txt");
  out.manifest["artifacts"].push_back("texture.txt");
  std::vector<Vec3> dirs(s.spins.begin(), s.spins.end());
  const auto q = winding_number(g.layout, dirs);
  const cplx psi = order_parameter(s, g.layout);
  out.manifest["summary"] = {{"Q", q.value},
                             {"Q_ill_defined_triangles", q.ill_defined},
                             {"abs_psi", std::abs(psi)},
                             {"psi_incoherent", psi_incoherent(s, g.layout)}};
  std::cout << fmt::format("init {}: Q = {:.5f}, |Psi(0)| = {:.5f}\n", cfg.init, q.value, std::abs(psi));
}

std::vector<double> sample_times(const RunConfig& cfg) {
  std::vector<double> t;
  const double dt = cfg.step * cfg.output_every;
  const auto n = static_cast<std::size_t>(std::floor(cfg.t_end / dt + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) t.push_back(static_cast<double>(i) * dt);
  return t;
}

void cmd_evolve(const RunConfig& cfg, Output& out) {
  const bool need_modes = cfg.offresonant != "none";
  auto g = build_geometry(cfg, need_modes);
  TimeSeries ts;
  if (cfg.solver == "exact") {
    if (cfg.init != "bcs" || !cfg.texture_file.empty() || cfg.pulse_area_rad >= 0.0 || cfg.odf_waist_over_r > 0.0)
      throw Error(ErrorCategory::kCapability, "the exact solver starts from the flat-beam BCS texture only");
    const auto basis = RingBasis::make(RingCrystalSpec::make(cfg.rings));
    ts = evolve_exact(ring_bcs_state(basis), basis, {cfg.k_over_j, 1.0, g.layout.size()}, sample_times(cfg));
  } else {
    const auto s0 = initial_state(cfg, g.layout);
    Model m = cfg.model == "1ch" ? Model::one_channel(cfg.k_over_j, 1.0, g.layout.size())
                                 : Model::two_channel(cfg.b1_over_g, cfg.delta1_over_g, 1.0, g.layout.size());
    if (need_modes) {
      if (!g.modes) throw Error(ErrorCategory::kConfig, "off-resonant terms need drumhead modes");
      const auto d = derive_model(g.trap, *g.beams, g.layout, *g.modes, scattering_rates(cfg));
      const auto c = offresonant_couplings(g.layout, *g.modes, g.trap, *g.beams, d);
      const bool all = cfg.offresonant == "all";
      auto has = [&](const char* k) { return all || ("," + cfg.offresonant + ",").find(std::string(",") + k + ",") != std::string::npos; };
      m = extend_with_offresonant(m, ExchangeTerms::from_couplings(c, d.J, has("j12"), has("j11"), has("j5"), has("shifts")));
      out.manifest["derived_model"] = {{"J_hz", to_hz(d.J)}, {"K_hz", to_hz(d.K)}, {"B1_hz", to_hz(d.B1)}};
    }
    const auto ec = evolve_config(cfg);
    ts = cfg.solver == "mf" ? evolve_mf(s0, g.layout, m, ec) : evolve_dtwa(s0, g.layout, m, ec);
    for (const auto& snap : ts.snapshots) {
      save_texture(snap.mean, g.layout, out.dir / texture_name(snap.t));
      out.manifest["artifacts"].push_back(texture_name(snap.t));
    }
  }
  out.write("layout.txt", format_layout(g.layout));
  out.write("timeseries.csv", format_timeseries_csv(ts));
  out.manifest["solver"] = ts.solver;
  out.manifest["diagnostics"] = diagnostics_json(ts.diagnostics);
  out.manifest["scattering_budget"] = budget_json(cfg);
  const auto abs_psi = ts.abs_psi();
  std::cout << fmt::format("{} {}: |Psi| {:.5f} -> {:.5f} over t = [0, {}]; energy drift {:.2e}\n", ts.solver,
                           cfg.model, abs_psi.front(), abs_psi.back(), ts.t.back(), ts.diagnostics.max_energy_drift);
  if (ts.diagnostics.step_warning) std::cerr << "warning: energy drift above 1e-6, consider a smaller step\n";
}

void cmd_analyze(const RunConfig& cfg, Output& out) {
  auto g = build_geometry(cfg, false);
  const auto s = load_texture(cfg.texture_file, g.layout);
  TopologyReport r;
  std::vector<Vec3> dirs(s.spins.begin(), s.spins.end());
  const auto tri = delaunay(g.layout);
  const auto q = winding_number(tri, dirs);
  r.Q = q.value;
  r.ill_defined_triangles = q.ill_defined;
  double mu = 0.0;
  if (!cfg.timeseries_file.empty()) {
    const auto ts = read_timeseries_csv(cfg.timeseries_file);
    r.mu = extract_mu_infty(ts, cfg.mu_window);
    if (r.mu) mu = r.mu->mu;
    if (ts.size() >= 3 && ts.t.back() >= PhaseOptions{}.min_duration) r.phase = classify_phase(ts);
  }
  if (r.mu || cfg.timeseries_file.empty()) {
    const auto field = effective_field(s, g.layout, cfg.k_over_j, 1.0, mu);
    const auto w = winding_number(tri, field);
    r.W = w.value;
    r.ill_defined_triangles += w.ill_defined;
    r.cpdf = cpdf(s, g.layout, cfg.k_over_j, 1.0, mu);
    r.zero_crossings = cpdf_zero_crossings(r.cpdf);
    out.write("cpdf.csv", format_cpdf_csv(r.cpdf));
  }
  out.write("triangulation.csv", format_triangulation_csv(tri));
  out.write("topology.json", topology_report_json(r));
  std::cout << topology_report_json(r) << "\n";
}

void cmd_params(const RunConfig& cfg, Output& out, bool table_only) {
  RunConfig c = cfg;
  if (c.crystal == "rings" && c.layout_file.empty())
    throw Error(ErrorCategory::kCapability, "parameter derivation needs an equilibrium crystal");
  auto g = build_geometry(c, true);
  if (!g.modes) throw Error(ErrorCategory::kConfig, "parameter derivation needs drumhead modes");
  const auto table = rwa_table(g.trap, *g.beams, *g.modes);
  out.write("rwa_table.csv", format_rwa_csv(table));
  out.write("rwa_table.txt", format_rwa_table(table));
  std::string text;
  if (!table_only) {
    auto d = derive_model(g.trap, *g.beams, g.layout, *g.modes, scattering_rates(cfg));
    if (cfg.doppler_radius_m > 0.0) d.doppler = doppler_b1(*g.beams, cfg.doppler_radius_m);
    text = format_derived_model(d);
    text += fmt::format("{:<22} {:.4f} deg\n", "theta", g.beams->tilt * 180.0 / kPi);
    text += fmt::format("{:<22} {:.5f} deg\n", "delta theta", g.beams->misalignment * 180.0 / kPi);
    text += fmt::format("{:<22} {:.2f} um\n", "Raman waist w", g.beams->raman_waist * 1e6);
    text += fmt::format("{:<22} {:.3f} kHz\n", "mu_r/2pi", to_hz(g.beams->beatnote) * 1e-3);
    out.write("derived_model.txt", text);
    out.manifest["derived_model"] = {
        {"eta1", d.eta1},          {"eta_x", d.eta_x},
        {"G_hz", to_hz(d.G)},      {"J_hz", to_hz(d.J)},
        {"B1_hz", to_hz(d.B1)},    {"K_hz", to_hz(d.K)},
        {"delta1_hz", to_hz(d.delta1)}, {"theta_deg", g.beams->tilt * 180.0 / kPi},
        {"delta_theta_deg", g.beams->misalignment * 180.0 / kPi},
        {"raman_waist_m", g.beams->raman_waist},
        {"eta_r_max", d.doppler.eta_r_max}, {"doppler_b1_hz", to_hz(d.doppler.b1)},
        {"gamma_tot_hz", to_hz(d.budget.gamma_tot)},
        {"jt_budget", d.budget.unbounded() ? nlohmann::json("unbounded") : nlohmann::json(d.budget.jt_budget)}};
  }
  std::cout << text << format_rwa_table(table);
}

}  // namespace

void run(const RunConfig& cfg) {
  cfg.validate();
  Output out;
  out.dir = resolve_output_dir(cfg);
  std::error_code ec;
  fs::create_directories(out.dir, ec);
  if (ec) throw Error(ErrorCategory::kIo, "cannot create " + out.dir.string() + ": " + ec.message());
  out.manifest = manifest_base(cfg);
  if (cfg.subcommand == "crystal") cmd_crystal(cfg, out);
  else if (cfg.subcommand == "init") cmd_init(cfg, out);
  else if (cfg.subcommand == "evolve") cmd_evolve(cfg, out);
  else if (cfg.subcommand == "analyze") cmd_analyze(cfg, out);
  else if (cfg.subcommand == "params") cmd_params(cfg, out, false);
  else if (cfg.subcommand == "rwa-table") cmd_params(cfg, out, true);
  else reproduce_figure(cfg, out.dir, out.manifest);
  write_text(out.dir / "manifest.json", out.manifest.dump(2) + "\n");
}

int cli_main(int argc, char** argv) {
  CLI::App app{"pwave: chiral p-wave pairing dynamics on trapped-ion crystals"};
  app.set_config("--config", "", "TOML/INI file with key = value settings");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(0, 1);
  app.fallthrough();
  RunConfig cfg;
  std::string manifest_path;
  app.add_option("--from-manifest", manifest_path, "re-run from a manifest.json")->check(CLI::ExistingFile);
  CLI::Option* outdir_opt = nullptr;
  for_each_field(cfg, [&](const char* key, auto& v, const char* help) {
    const std::string k = key;
    std::string names = "--" + dashed(k);
    if (dashed(k) != k) names += ",--" + k;
    CLI::Option* o = nullptr;
    if constexpr (IsBool<std::decay_t<decltype(v)>>::value) o = app.add_flag(names, v, help);
    else o = app.add_option(names, v, help)->capture_default_str();
    if (k == "output_dir") outdir_opt = o;
  });
  app.add_subcommand("crystal", "equilibrium or ring crystal with drumhead modes");
  app.add_subcommand("init", "prepare an initial spin texture");
  app.add_subcommand("evolve", "time evolution (mf | dtwa | exact)");
  app.add_subcommand("analyze", "winding numbers, mu_infinity, CPDF and phase of a texture");
  app.add_subcommand("params", "laboratory parameters and the resonance table");
  app.add_subcommand("rwa-table", "resonance table only");
  auto* fig = app.add_subcommand("reproduce-figure", "data bundles for figures 2-6");
  fig->add_option("id", cfg.figure, "figure id (2-6)")->required();
  app.footer(
      "exit codes: 0 ok, 1 internal, 2 usage, 3 config, 4 validation, 5 parse, 6 numerical, "
      "7 capability, 8 io\nenvironment: PWAVE_OUTPUT_DIR sets the default output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::FileError& e) {
    app.exit(e);
    return static_cast<int>(ErrorCategory::kIo);
  } catch (const CLI::ConversionError& e) {
    app.exit(e);
    return static_cast<int>(ErrorCategory::kConfig);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorCategory::kUsage);
  }

  try {
    if (app.get_subcommands().empty() && manifest_path.empty()) {
      std::cerr << "pwave: a subcommand is required (see --help)\n";
      return static_cast<int>(ErrorCategory::kUsage);
    }
    if (!app.get_subcommands().empty()) cfg.subcommand = app.get_subcommands().front()->get_name();
    if (!manifest_path.empty()) {
      nlohmann::json m;
      try {
        m = nlohmann::json::parse(detail::read_text(manifest_path));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCategory::kParse, manifest_path + ": " + e.what());
      }
      if (!m.contains("config")) throw Error(ErrorCategory::kParse, manifest_path + ": no config object");
      const std::string out_dir = cfg.output_dir;
      cfg = RunConfig::from_json(m.at("config"));
      if (outdir_opt->count() > 0) cfg.output_dir = out_dir;
    }
    run(cfg);
    return 0;
  } catch (const Error& e) {
    std::cerr << "pwave: error [" << category_name(e.category()) << "]: " << e.what() << "\n";
    return static_cast<int>(e.category());
  } catch (const std::exception& e) {
    std::cerr << "pwave: error [internal]: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pwave
