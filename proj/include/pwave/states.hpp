/**
 * @file states.hpp
 * @brief Initial spin textures produced by the site-dependent rotation drive.
 *
 * Spin components are stored in the rotated frame (script X, Y, Z), where the
 * script Z axis is the pairing axis. s^+ = s_X + i s_Y.
 */
#pragma once

#include "pwave/core.hpp"
#include "pwave/crystal.hpp"

#include <filesystem>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace pwave {

struct SpinConfiguration {
  std::vector<Vec3> spins;
  std::optional<cplx> alpha;  ///< oscillator amplitude, two-channel only

  std::size_t size() const { return spins.size(); }
  cplx s_plus(std::size_t j) const { return {spins[j].x(), spins[j].y()}; }
  cplx s_minus(std::size_t j) const { return {spins[j].x(), -spins[j].y()}; }
  double total_sz() const;
};

enum class InitKind { kBcs, kBec, kDomainWall, kRawRotation };
enum class Polarity { kUp, kDown };

const char* init_kind_name(InitKind k);
InitKind parse_init_kind(const std::string& s);

/**
 * Rotation drive Omega_j = Omega_0 r~_j exp(-r_j^2 / w^2) applied for time T.
 * Only the pulse area Omega_0 T enters; the waist is in units of R and
 * infinity means a flat beam.
 */
struct InitProtocol {
  InitKind kind = InitKind::kRawRotation;
  double pulse_area = 0.0;                                      ///< Omega_0 T
  double waist = std::numeric_limits<double>::infinity();      ///< w_ODF / R
  double domain_radius = 0.5;                                   ///< r_d / R
  Polarity start = Polarity::kUp;

  void validate() const;
  /// Omega_j T for an ion at normalized radius r.
  double angle_at(double r_norm) const;

  static InitProtocol bcs();
  static InitProtocol bec();
  static InitProtocol domain_wall();
};

/// Pulse area Omega_0 T that gives a peak rotation angle `peak` for waist w/R < sqrt(2).
double pulse_area_for_peak(double peak, double waist);

/// (e_X', e_Y') in rotated-frame components.
std::pair<Vec3, Vec3> local_axes(double phi);

SpinConfiguration polarized_state(std::size_t n, Polarity p);

/// Rotates each spin by Omega_j T about its local e_Y' axis. The kind and
/// start fields of the protocol are ignored; the given state is the start.
SpinConfiguration apply_init_rotation(const SpinConfiguration& state, const CrystalLayout& layout,
                                      const InitProtocol& proto);

/// Full protocol: polarize (with the domain for kDomainWall), then rotate.
SpinConfiguration make_initial_state(const CrystalLayout& layout, const InitProtocol& proto);

SpinConfiguration make_bcs_state(const CrystalLayout& layout);
SpinConfiguration make_bec_state(const CrystalLayout& layout);
SpinConfiguration make_domain_wall_state(const CrystalLayout& layout);

/// Texture file rows: index x_over_R y_over_R s_X s_Y s_Z.
void save_texture(const SpinConfiguration& s, const CrystalLayout& layout,
                  const std::filesystem::path& path);
/// Reads spins back; positions in the file are checked against the layout.
SpinConfiguration load_texture(const std::filesystem::path& path, const CrystalLayout& layout);

}  // namespace pwave
