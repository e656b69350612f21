/**
 * @file crystal.hpp
 * @brief Ion-crystal geometries: ideal concentric rings and equilibrated
 *        planar Penning-trap crystals with their drumhead (axial) modes.
 *
 * Layouts are stored in the frame co-rotating with the crystal. Positions are
 * kept normalized to the crystal radius R; every derived per-ion quantity
 * (normalized radius, azimuth) is computed by one factory so that a layout
 * read back from disk is bit-identical to the one written.
 */
#pragma once

#include "pwave/core.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pwave {

/// Penning-trap parameters. All frequencies are angular (rad/s).
struct TrapConfig {
  double rotation_freq = 0.0;   ///< omega_r
  double axial_freq = 0.0;      ///< omega_z, equal to the c.m. drumhead frequency
  double cyclotron_freq = 0.0;  ///< omega_c
  double ion_mass = constants::beryllium9_mass;
  std::size_t ion_count = 0;
  std::string label;

  /// omega_r (omega_c - omega_r) - omega_z^2 / 2; positive for radial confinement.
  double radial_stiffness() const;
  /// Throws Error{kValidation} listing every violated invariant.
  void validate() const;

  /// 9Be+ at 4.46 T; omega_r/2pi = 180 kHz, omega_z/2pi = 1.59 MHz.
  static TrapConfig case_a(std::size_t ions = 200);
  /// omega_r/2pi = 900 kHz, omega_z/2pi = 3.42 MHz.
  static TrapConfig case_b(std::size_t ions = 200);
};

/// Coulomb length (k_e q^2 / (m omega_z^2))^(1/3) in meters.
double coulomb_length(const TrapConfig& trap);

/// Dimensionless radial confinement: radial_stiffness / omega_z^2.
double confinement_ratio(const TrapConfig& trap);

struct CrystalLayout {
  double radius = 0.0;          ///< R in meters (0 for a single ion at the origin)
  std::vector<double> x;        ///< x_j / R
  std::vector<double> y;        ///< y_j / R
  std::vector<double> r_norm;   ///< r_j / R
  std::vector<double> phi;      ///< azimuth in (-pi, pi]

  std::size_t size() const { return x.size(); }
  double r_meters(std::size_t j) const { return r_norm[j] * radius; }

  /// Builds a layout from normalized coordinates; derives r_norm and phi.
  static CrystalLayout from_normalized(double radius_m, std::vector<double> xn,
                                       std::vector<double> yn);
  /// Builds a layout from positions in meters; R is the largest radius.
  static CrystalLayout from_positions(const std::vector<double>& x_m,
                                      const std::vector<double>& y_m);

  /// Throws Error{kValidation} if r_norm leaves [0, 1] or sizes disagree.
  void validate() const;
};

struct RingCrystalSpec {
  int rings = 0;
  std::vector<int> populations;  ///< N_m = 6(m-1) + delta_{m,1}
  std::vector<double> radii;     ///< r_m / R = (m-1)/(M-1)

  static RingCrystalSpec make(int rings);
  int total() const;
  /// Index of the first ion of ring m (0-based ring index) in make_ring_crystal order.
  int offset(int ring) const;
};

/// 1 + 3M(M-1).
int hexagonal_count(int rings);

/// Ions are ordered ring by ring, and within a ring by increasing angle 2 pi i / N_m.
CrystalLayout make_ring_crystal(int rings, double radius_m = 1e-4);

struct EquilibriumOptions {
  double gradient_tol = 1e-9;     ///< max-norm of the dimensionless gradient
  int max_iterations = 20000;     ///< quasi-Newton iterations per attempt
  int max_restarts = 6;
  std::uint64_t seed = 12345;     ///< perturbation seed for restarts
};

/**
 * Minimizes the dimensionless rotating-frame energy
 *   sum_j beta |u_j|^2 / 2 + sum_{j<k} 1 / |u_j - u_k|
 * (lengths in units of coulomb_length) and returns the planar equilibrium,
 * rotated so that the outermost ion lies on the +x axis and ions sorted by
 * radius. A seed layout (in any units, only its shape is used) may replace the
 * default hexagonal seed.
 */
CrystalLayout equilibrate_crystal(const TrapConfig& trap,
                                  const std::optional<CrystalLayout>& seed = std::nullopt,
                                  const EquilibriumOptions& options = {});

/// Dimensionless energy and gradient at the given layout (for diagnostics and tests).
double crystal_energy(const CrystalLayout& layout, const TrapConfig& trap);
Eigen::VectorXd crystal_gradient(const CrystalLayout& layout, const TrapConfig& trap);

struct ModeData {
  std::vector<double> frequencies;  ///< omega_n in rad/s, descending; n = 0 is c.m.
  Eigen::MatrixXd vectors;          ///< M(j, n), orthonormal columns
  std::vector<double> lamb_dicke;   ///< eta_n = dk_z sqrt(hbar / (2 m omega_n))

  std::size_t size() const { return frequencies.size(); }
};

/// Axial normal modes of a planar crystal (in-plane motion held rigid).
ModeData drumhead_modes(const CrystalLayout& layout, const TrapConfig& trap, double dk_z);

/// Layout file: header "N R_meters", then N rows "index x_over_R y_over_R".
void save_layout(const CrystalLayout& layout, const std::filesystem::path& path);
CrystalLayout load_layout(const std::filesystem::path& path);
CrystalLayout parse_layout(const std::string& text);
std::string format_layout(const CrystalLayout& layout);

/// Mode file: "N", N frequency rows (rad/s), then N matrix rows.
void save_modes(const ModeData& modes, const std::filesystem::path& path);
ModeData load_modes(const std::filesystem::path& path);

}  // namespace pwave
