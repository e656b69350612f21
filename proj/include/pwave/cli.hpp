/**
 * @file cli.hpp
 * @brief Run configuration and the command-line front end.
 *
 * Every physical input carries its unit in the key name. The same keys are
 * accepted as flags (with dashes or underscores), in a TOML/INI config file
 * and in the "config" object of a run manifest.
 */
#pragma once

#include "pwave/core.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pwave {

struct RunConfig {
  std::string subcommand = "evolve";

  // crystal
  std::string crystal = "equilibrium";  ///< equilibrium | rings
  std::string trap_case = "A";          ///< A | B | custom
  std::size_t ions = 200;
  int rings = 5;
  double ring_radius_m = 1e-4;
  double rotation_freq_hz = 180e3;      ///< custom trap only
  double axial_freq_hz = 1.59e6;        ///< custom trap only
  double magnetic_field_t = 4.46;       ///< custom trap only
  double ion_mass_u = 9.012;
  std::string layout_file;
  std::string modes_file;

  // initial state
  std::string init = "bcs";              ///< bcs | bec | domain_wall | raw
  double pulse_area_rad = -1.0;          ///< < 0: protocol default
  double odf_waist_over_r = -1.0;        ///< < 0: protocol default; 0: flat beam
  double domain_radius_over_r = -1.0;    ///< < 0: protocol default
  std::string texture_file;

  // model and solver
  std::string solver = "mf";  ///< mf | dtwa | exact
  std::string model = "1ch";  ///< 1ch | 2ch
  double k_over_j = 1.0;
  double b1_over_g = 0.31622776601683794;
  double delta1_over_g = 0.0;
  std::string offresonant = "none";  ///< none, or a comma list of j12, j11, j5, shifts (or "all")

  // integration
  double step = 0.01;
  double t_end = 10.0;
  int output_every = 10;
  std::size_t n_traj = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  bool no_spin_noise = false;
  bool no_oscillator_noise = false;
  bool clamp_correlator = false;
  std::vector<double> snapshot_times;

  // laboratory parameters
  double delta_ac_hz = 40e3;
  double eta1 = 0.3;
  double eta_x = 0.3;
  double delta1_hz = 2e3;
  double raman_rabi_hz = 10e3;
  double b1_over_j = 1.0;
  double wavelength_m = 313e-9;
  double spin_splitting_hz = 124e9;
  double raman_tilt_rad = 0.0;
  double gamma_odf_hz = 38.0;
  double gamma_raman_hz = 15.0;
  double doppler_radius_m = 0.0;  ///< radius for the Doppler estimate; 0 = crystal radius

  // analysis
  std::string timeseries_file;
  double mu_window = 0.5;

  // reproduce-figure
  int figure = 0;
  bool quick = false;  ///< reduced trajectory counts and durations

  std::string output_dir;  ///< empty: $PWAVE_OUTPUT_DIR, else ./pwave_out

  /// Throws Error{kConfig} listing every violated constraint.
  void validate() const;

  nlohmann::json to_json() const;
  /// Unknown keys raise Error{kConfig}.
  static RunConfig from_json(const nlohmann::json& j);
};

/// Output directory after applying the environment default.
std::filesystem::path resolve_output_dir(const RunConfig& cfg);

/// Git-style blob hash (SHA-1 hex) of the canonical config JSON.
std::string config_hash(const RunConfig& cfg);

/// Runs one command. Artifacts are written below the output directory.
/// Throws pwave::Error on failure.
void run(const RunConfig& cfg);

/// Full front end: parses argv, runs and maps failures to exit codes
/// (0 ok, 2 usage, 3 config, 4 validation, 5 parse, 6 numerical,
/// 7 capability, 8 io, 1 anything else).
int cli_main(int argc, char** argv);

}  // namespace pwave
