/**
 * @file params.hpp
 * @brief Laboratory parameters: beam geometry to model couplings, resonance
 *        table, off-resonant coupling matrices and the scattering budget.
 *
 * Frequencies are angular (rad/s) unless a name says otherwise.
 */
#pragma once

#include "pwave/core.hpp"
#include "pwave/crystal.hpp"
#include "pwave/dynamics.hpp"

#include <limits>
#include <string>
#include <vector>

namespace pwave {

/// 313 nm Be+ Raman/ODF wavelength.
inline constexpr double kDefaultWavenumber = kTwoPi / 313e-9;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct BeamConfig {
  double delta_ac = 0.0;        ///< ODF Stark-shift strength
  double wavenumber = kDefaultWavenumber;  ///< k, 1/m
  double tilt = 0.0;            ///< theta, rad
  double misalignment = 0.0;    ///< delta theta, rad
  double beatnote = 0.0;        ///< mu_r
  double raman_rabi = 0.0;      ///< B_0
  double raman_waist = kInfinity;  ///< w, m (infinite = flat)
  double odf_waist = kInfinity;    ///< w_ODF, m
  double spin_splitting = to_angular(124e9);  ///< omega_s
  double raman_tilt = 0.0;      ///< theta_R, rad

  /// Throws Error{kValidation} listing every violated constraint.
  void validate() const;
};

struct ScatteringRates {
  double odf = to_angular(38.0);
  double raman = to_angular(15.0);
};

struct ScatteringBudget {
  double gamma_odf = 0.0;
  double gamma_raman = 0.0;
  double gamma_tot = 0.0;
  double jt_budget = kInfinity;  ///< J / Gamma_tot; infinite when nothing scatters
  bool unbounded() const { return !(jt_budget < kInfinity); }
};

ScatteringBudget scattering_budget(double gamma_odf, double gamma_raman, double J);

struct DopplerDispersion {
  double eta_r_max = 0.0;   ///< (omega_s / c) cos(theta_R) R
  double b1 = 0.0;          ///< B_0 eta_r_max^2 / 4
  bool valid = true;        ///< eta_r_max^2 well below 1 (< 0.1)
};

DopplerDispersion doppler_b1(const BeamConfig& beams, double radius);

struct DerivedModel {
  std::size_t N = 0;
  double radius = 0.0;      ///< m
  double omega1 = 0.0;      ///< c.m. frequency
  double l_zp = 0.0;        ///< c.m. zero-point length, m
  double dk_z = 0.0;        ///< 1/m
  double dk_x = 0.0;        ///< 1/m
  double eta1 = 0.0;
  double eta_x = 0.0;
  double G = 0.0;
  double delta1 = 0.0;      ///< B_0 - mu_r + omega_1 + omega_r
  double J = 0.0;           ///< G^2 / delta1 (NaN exactly on resonance)
  double B1 = 0.0;          ///< B_0 R^2 / w^2
  double K = 0.0;           ///< B1 - J / N
  DopplerDispersion doppler;
  ScatteringBudget budget;
};

/// Zero-point length sqrt(hbar / (2 m omega)).
double zero_point_length(double mass, double omega);

// Forward and inverse geometry relations.
double eta1_from_tilt(double tilt, double wavenumber, double l_zp);
/// Throws Error{kValidation} when eta1 > 2 k l_zp (no tilt reaches it).
double tilt_from_eta1(double eta1, double wavenumber, double l_zp);
double eta_x_from_misalignment(double misalignment, double wavenumber, double radius, double tilt);
double misalignment_from_eta_x(double eta_x, double wavenumber, double radius, double tilt);
double b1_from_waist(double waist, double raman_rabi, double radius);
double waist_from_b1(double b1, double raman_rabi, double radius);
/// mu_r placing the c.m. mode at detuning delta1: B_0 + omega_1 + omega_r - delta1.
double tuned_beatnote(double raman_rabi, double omega1, double rotation, double delta1);

DerivedModel derive_model(const TrapConfig& trap, const BeamConfig& beams,
                          const CrystalLayout& layout, const ModeData& modes,
                          const ScatteringRates& rates = {});

/// Operating point expressed through the small parameters instead of angles.
struct DesignTargets {
  double eta1 = 0.3;
  double eta_x = 0.3;
  double delta_ac = to_angular(40e3);
  double delta1 = to_angular(2e3);
  double raman_rabi = to_angular(10e3);
  double b1_over_j = 1.0;  ///< waist chosen so that B1 = this * J (0 = flat beam)
  double wavenumber = kDefaultWavenumber;
  double spin_splitting = to_angular(124e9);
  double raman_tilt = 0.0;
};

/// Solves the inverse relations for a crystal of radius R with c.m. frequency omega1.
BeamConfig design_beams(const TrapConfig& trap, double radius, double omega1,
                        const DesignTargets& targets = {});

// ---------------------------------------------------------------------------
// Resonance table

struct RwaRow {
  std::string name;  ///< "T11" ... "T64"
  double min = 0.0;  ///< rad/s
  double max = 0.0;
};

struct RwaTable {
  std::string label;
  std::vector<RwaRow> rows;
  const RwaRow& row(const std::string& name) const;
};

/// All rows over the drumhead spectrum; the c.m. mode is left out of T11.
RwaTable rwa_table(const TrapConfig& trap, const BeamConfig& beams, const ModeData& modes);

/// Aligned text and CSV, in kHz.
std::string format_rwa_table(const RwaTable& t);
std::string format_rwa_csv(const RwaTable& t);
std::string format_derived_model(const DerivedModel& d);

// ---------------------------------------------------------------------------
// Off-resonant couplings

enum class CouplingKind { kJ5, kJ11, kJ12 };
const char* coupling_name(CouplingKind k);

/// Spectral guard band: any denominator closer to zero than this is an
/// accidental resonance.
inline constexpr double kGuardBand = to_angular(100.0);

/// Contribution of drumhead mode n to one coupling matrix (rad/s).
Eigen::MatrixXcd mode_coupling(CouplingKind kind, std::size_t n, const CrystalLayout& layout,
                               const ModeData& modes, const TrapConfig& trap,
                               const BeamConfig& beams, const DerivedModel& derived);

/// The part of J12 carried by the c.m. mode at detuning delta1; equal to the
/// one-channel exchange -(J/N) r~_j r~_k e^{-i(phi_j - phi_k)} for every (j, k).
Eigen::MatrixXcd resonant_chiral_part(const CrystalLayout& layout, const ModeData& modes,
                                      const TrapConfig& trap, const BeamConfig& beams,
                                      const DerivedModel& derived);

/// Sum over all modes; J12 has the resonant part removed. Throws
/// Error{kNumerical} naming the mode and term on an accidental resonance.
OffResonantCouplings offresonant_couplings(const CrystalLayout& layout, const ModeData& modes,
                                           const TrapConfig& trap, const BeamConfig& beams,
                                           const DerivedModel& derived);

}  // namespace pwave
