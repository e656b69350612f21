// Helpers shared by the command handlers and the figure bundles.
#pragma once

#include "pwave/analysis.hpp"
#include "pwave/cli.hpp"
#include "pwave/crystal.hpp"
#include "pwave/dynamics.hpp"
#include "pwave/params.hpp"
#include "pwave/states.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace pwave::detail {

TrapConfig make_trap(const RunConfig& cfg);
DesignTargets design_targets(const RunConfig& cfg);
ScatteringRates scattering_rates(const RunConfig& cfg);

struct Geometry {
  TrapConfig trap;
  CrystalLayout layout;
  std::optional<ModeData> modes;  ///< equilibrium crystals only
  std::optional<BeamConfig> beams;
};

/// Layout from file, ring construction or equilibration; modes and beams are
/// added for equilibrium crystals when `with_modes` is set.
Geometry build_geometry(const RunConfig& cfg, bool with_modes);

InitProtocol init_protocol(const RunConfig& cfg);
SpinConfiguration initial_state(const RunConfig& cfg, const CrystalLayout& layout);
EvolveConfig evolve_config(const RunConfig& cfg);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Run manifest skeleton: config echo, hash, seed and versions.
nlohmann::json manifest_base(const RunConfig& cfg);
nlohmann::json diagnostics_json(const Diagnostics& d);

void reproduce_figure(const RunConfig& cfg, const std::filesystem::path& out,
                      nlohmann::json& manifest);

}  // namespace pwave::detail
