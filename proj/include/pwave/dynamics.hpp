/**
 * @file dynamics.hpp
 * @brief Mean-field and dTWA evolution of the one- and two-channel models.
 *
 * Time and frequencies share one arbitrary unit: if K and J are given in units
 * of J, times are Jt. The one-channel Hamiltonian is
 *   H = K sum_j r~_j^2 S^Z_j - (J/N) sum_{j != k} r~_j r~_k e^{-i(phi_j - phi_k)} S^+_j S^-_k,
 * the two-channel one
 *   H = B1 sum_j r~_j^2 S^Z_j + delta1 a^dag a
 *       + (i G / sqrt N) sum_j r~_j (e^{i phi_j} S^-_j a^dag - e^{-i phi_j} S^+_j a).
 */
#pragma once

#include "pwave/core.hpp"
#include "pwave/crystal.hpp"
#include "pwave/rng.hpp"
#include "pwave/states.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace pwave {

struct OneChannelParams {
  double K = 0.0;
  double J = 1.0;
  std::size_t N = 0;
  void validate() const;
};

struct TwoChannelParams {
  double B1 = 0.0;
  double delta1 = 0.0;
  double G = 1.0;
  std::size_t N = 0;
  void validate() const;
};

/// Off-resonant couplings in rad/s, each a Hermitian matrix of the
/// S^+_j S^-_k form. Diagonal entries act as S^+_j S^-_j = 1/2 + S^Z_j.
struct OffResonantCouplings {
  Eigen::MatrixXcd j5;   ///< achiral
  Eigen::MatrixXcd j11;  ///< anti-chiral
  Eigen::MatrixXcd j12;  ///< chiral, all modes, with the resonant c.m. part removed
  std::vector<double> z_shift;  ///< per-site script-Z field from the single-spin Stark shifts
};

/// Extra terms sum_{j != k} E_jk S^+_j S^-_k + sum_j h_j S^Z_j in model units.
struct ExchangeTerms {
  Eigen::MatrixXcd exchange;  ///< zero diagonal
  Eigen::VectorXd field;

  /// Combines selected couplings, divides by `unit` (rad/s per model unit) and
  /// folds diagonal exchange entries into the field.
  static ExchangeTerms from_couplings(const OffResonantCouplings& c, double unit, bool with_j12,
                                      bool with_j11, bool with_j5, bool with_shifts);
};

struct Model {
  enum class Kind { kOneChannel, kTwoChannel };
  Kind kind = Kind::kOneChannel;
  OneChannelParams one;
  TwoChannelParams two;
  std::optional<ExchangeTerms> extra;  ///< one-channel only

  static Model one_channel(double K, double J, std::size_t N);
  static Model two_channel(double B1, double delta1, double G, std::size_t N);
  std::size_t size() const { return kind == Kind::kOneChannel ? one.N : two.N; }
  void validate() const;
};

/// The one-channel model with extra exchange terms attached. Throws
/// Error{kValidation} on a size mismatch and Error{kCapability} for two-channel.
Model extend_with_offresonant(const Model& base, const ExchangeTerms& extra);

/// Packed derivative: spins then (for two-channel) alpha.
struct StateDerivative {
  std::vector<Vec3> spins;
  cplx alpha{0.0, 0.0};
};

StateDerivative mf_rhs_one_channel(const SpinConfiguration& s, const CrystalLayout& layout,
                                   const OneChannelParams& p,
                                   const ExchangeTerms* extra = nullptr);
StateDerivative mf_rhs_two_channel(const SpinConfiguration& s, const CrystalLayout& layout,
                                   const TwoChannelParams& p);

/// Mean-field energy <H> of the model at a classical state.
double model_energy(const SpinConfiguration& s, const CrystalLayout& layout, const Model& m);

struct EvolveConfig {
  double step = 1e-3;
  double t_end = 10.0;
  int output_every = 100;             ///< steps between recorded samples
  std::size_t n_traj = 1000;
  std::uint64_t seed = 1;
  bool sample_spins = true;
  bool sample_oscillator = true;
  bool clamp_negative_correlator = false;  ///< Psi~: clamp instead of absolute value
  std::vector<double> snapshot_times;
  unsigned threads = 0;               ///< 0 = hardware concurrency
  void validate() const;
};

struct Diagnostics {
  double max_norm_drift = 0.0;     ///< max_j,t ||s_j(t)| - |s_j(0)||
  double max_sz_drift = 0.0;       ///< relative to max(|X0|, 1); X = sum S^Z (+|alpha|^2)
  double max_energy_drift = 0.0;   ///< relative to max(|E0|, 1)
  bool step_warning = false;       ///< energy drift above 1e-6
  std::size_t negative_correlator_samples = 0;
};

struct Snapshot {
  double t = 0.0;
  SpinConfiguration mean;  ///< trajectory-averaged spins
};

struct TimeSeries {
  std::vector<double> t;
  std::vector<cplx> psi;
  std::vector<double> psi_tilde;
  std::vector<double> sz_total;
  std::vector<double> energy;
  std::vector<double> n_cm;  ///< oscillator occupation (two-channel), else 0
  std::vector<Snapshot> snapshots;
  Diagnostics diagnostics;
  std::string solver;

  std::size_t size() const { return t.size(); }
  std::vector<double> abs_psi() const;
};

/// Orthonormal frame (e_par, e_perp1, e_perp2) with e_par along v. Deterministic.
std::array<Vec3, 3> spin_frame(const Vec3& v);

SpinConfiguration sample_dtwa_spins(const SpinConfiguration& mean, PhiloxStream& rng);
cplx sample_dtwa_oscillator(PhiloxStream& rng);

TimeSeries evolve_mf(const SpinConfiguration& s0, const CrystalLayout& layout, const Model& m,
                     const EvolveConfig& cfg);

/// Trajectory-averaged dTWA evolution. With both sampling flags off every
/// trajectory equals the mean-field one.
TimeSeries evolve_dtwa(const SpinConfiguration& mean, const CrystalLayout& layout, const Model& m,
                       const EvolveConfig& cfg);

/// Psi = (2/N) sum_j r~_j e^{i phi_j} s^-_j.
cplx order_parameter(const SpinConfiguration& s, const CrystalLayout& layout);

/// |sum_j r~_j e^{-i phi_j} s^+_j|^2 - sum_j r~_j^2 |s^+_j|^2 (the j != k pair sum).
double pair_correlator(const SpinConfiguration& s, const CrystalLayout& layout);

/// CSV: t_dimensionless, Re_Psi, Im_Psi, abs_Psi, Psi_tilde, Sz_total, energy, n_cm.
std::string format_timeseries_csv(const TimeSeries& ts);

}  // namespace pwave
