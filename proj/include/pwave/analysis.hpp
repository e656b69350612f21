/**
 * @file analysis.hpp
 * @brief Post-processing: phases, winding numbers, mu_infinity, CPDF, readout.
 */
#pragma once

#include "pwave/core.hpp"
#include "pwave/crystal.hpp"
#include "pwave/dynamics.hpp"
#include "pwave/states.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace pwave {

/// (2/N) sqrt|pair correlator| for a single classical state.
double psi_tilde(const SpinConfiguration& s, const CrystalLayout& layout);

/// Random-phase rms of Psi, (2/N) sqrt(sum_j r~_j^2 |s^+_j|^2); the finite-N
/// level a fully dephased texture fluctuates around.
double psi_incoherent(const SpinConfiguration& s, const CrystalLayout& layout);

// ---------------------------------------------------------------------------
// Triangulation and winding

struct Triangulation {
  std::vector<std::array<int, 3>> triangles;  ///< counterclockwise
};

Triangulation delaunay(const CrystalLayout& layout);
Triangulation delaunay(const std::vector<double>& x, const std::vector<double>& y);

/// Indices of the convex hull, counterclockwise (Andrew's monotone chain).
std::vector<int> convex_hull(const std::vector<double>& x, const std::vector<double>& y);

std::string format_triangulation_csv(const Triangulation& t);

struct SolidAngle {
  double omega = 0.0;
  bool ill_defined = false;
};

/// Signed solid angle of the spherical triangle (a, b, c) of unit vectors.
SolidAngle solid_angle(const Vec3& a, const Vec3& b, const Vec3& c, double eps = 1e-12);

struct Winding {
  double value = 0.0;
  std::size_t ill_defined = 0;  ///< excluded triangles
  bool approximate() const { return ill_defined > 0; }
};

/// (1/4 pi) sum of triangle solid angles; vectors are normalized internally.
Winding winding_number(const Triangulation& tri, const std::vector<Vec3>& field);
Winding winding_number(const CrystalLayout& layout, const std::vector<Vec3>& field);

// ---------------------------------------------------------------------------
// Effective field, mu_infinity, CPDF

/// Rotating-frame field for the one-channel model (units of J when K is K/J).
std::vector<Vec3> effective_field(const SpinConfiguration& s, const CrystalLayout& layout,
                                  double K, double J, double mu_infty);

struct MuInfty {
  double mu = 0.0;
  double psi_infty = 0.0;
};

/// Least-squares slope of the unwrapped phase of Psi over the last `window`
/// fraction of the series; mu = -slope / 2. Absent if |Psi| < floor anywhere
/// in the window.
std::optional<MuInfty> extract_mu_infty(const TimeSeries& ts, double window = 0.5,
                                        double floor = 1e-3);

/// Cross-check: dominant frequency of Psi over the same window from a
/// zero-padded discrete Fourier transform.
std::optional<MuInfty> extract_mu_infty_fourier(const TimeSeries& ts, double window = 0.5,
                                                double floor = 1e-3);

struct Cpdf {
  std::vector<double> r;
  std::vector<double> gamma;
  std::vector<int> site;   ///< ion index of each sample
  std::size_t excluded = 0;
};

Cpdf cpdf(const SpinConfiguration& s, const CrystalLayout& layout, double K, double J,
          double mu_infty, double eps = 0.02);

/// Sign changes between adjacent non-empty radial bins of the bin-mean gamma.
int cpdf_zero_crossings(const Cpdf& c, double bin_width = 0.05);

std::string format_cpdf_csv(const Cpdf& c);

// ---------------------------------------------------------------------------
// Phases

enum class Phase { kI, kII, kIII };
const char* phase_name(Phase p);

struct PhaseOptions {
  double window = 0.25;         ///< final fraction of the series
  double decay_fraction = 0.1;  ///< phase I if window mean < this * max|Psi|
  double floor_factor = 2.0;    ///< ... or below this * incoherent level
  double psi_incoherent = 0.0;  ///< incoherent level of the initial texture (0 = unused)
  double oscillation = 0.2;     ///< phase III if sigma/mean above this
  double min_duration = 40.0;
};

struct PhaseStats {
  Phase phase = Phase::kI;
  double mean = 0.0;
  double sigma = 0.0;
  double max_abs = 0.0;
  double threshold = 0.0;
};

PhaseStats classify_phase_stats(const TimeSeries& ts, const PhaseOptions& opt = {});
Phase classify_phase(const TimeSeries& ts, const PhaseOptions& opt = {});

// ---------------------------------------------------------------------------
// Readout

enum class Quadrature { kRe, kIm };

/// Evolves the texture under the flat-beam rotation drive (phase shifted by
/// pi/2 for Re) for times up to omega0_t_max, fits a quadratic to the total
/// script-Z spin and returns -2 slope / (N Omega_0).
double emulate_readout(const SpinConfiguration& s, const CrystalLayout& layout, Quadrature q,
                       double omega0_t_max = 0.01, int samples = 11);

// ---------------------------------------------------------------------------
// Report

struct TopologyReport {
  std::optional<double> Q;
  std::optional<double> W;
  std::optional<MuInfty> mu;
  std::optional<Phase> phase;
  Cpdf cpdf;
  int zero_crossings = 0;
  std::size_t ill_defined_triangles = 0;
};

std::string topology_report_json(const TopologyReport& r);

}  // namespace pwave
