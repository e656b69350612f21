#include "pwave/params.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace pwave {

void BeamConfig::validate() const {
  std::vector<std::string> bad;
  auto positive = [&](double v, const char* name) {
    if (!(v > 0.0)) bad.push_back(fmt::format("{} must be > 0 (got {})", name, v));
  };
  positive(delta_ac, "delta_ac");
  positive(wavenumber, "wavenumber");
  positive(tilt, "tilt");
  positive(beatnote, "beatnote");
  positive(raman_rabi, "raman_rabi");
  positive(raman_waist, "raman_waist");
  positive(odf_waist, "odf_waist");
  positive(spin_splitting, "spin_splitting");
  if (!(misalignment >= 0.0)) bad.push_back(fmt::format("misalignment must be >= 0 (got {})", misalignment));
  if (!(raman_tilt >= 0.0)) bad.push_back(fmt::format("raman_tilt must be >= 0 (got {})", raman_tilt));
  if (tilt >= 0.5 * kPi) bad.push_back("tilt must be below pi/2");
  if (bad.empty()) return;
  std::string msg = "invalid beam configuration:";
  for (const auto& b : bad) msg += "\n  " + b;
  throw Error(ErrorCategory::kValidation, msg);
}

ScatteringBudget scattering_budget(double gamma_odf, double gamma_raman, double J) {
  if (gamma_odf < 0.0 || gamma_raman < 0.0)
    throw Error(ErrorCategory::kValidation, "scattering rates must be non-negative");
  ScatteringBudget b;
  b.gamma_odf = gamma_odf;
  b.gamma_raman = gamma_raman;
  b.gamma_tot = gamma_odf + gamma_raman;
  b.jt_budget = b.gamma_tot > 0.0 ? std::abs(J) / b.gamma_tot : kInfinity;
  return b;
}

DopplerDispersion doppler_b1(const BeamConfig& beams, double radius) {
  DopplerDispersion d;
  d.eta_r_max = beams.spin_splitting / constants::speed_of_light * std::cos(beams.raman_tilt) * radius;
  if (std::abs(d.eta_r_max) < 1e-15) d.eta_r_max = 0.0;  // theta_R = pi/2
  d.b1 = 0.25 * beams.raman_rabi * d.eta_r_max * d.eta_r_max;
  d.valid = d.eta_r_max * d.eta_r_max < 0.1;
  return d;
}

double zero_point_length(double mass, double omega) {
  return std::sqrt(constants::hbar / (2.0 * mass * omega));
}

double eta1_from_tilt(double tilt, double wavenumber, double l_zp) {
  return 2.0 * wavenumber * std::sin(tilt) * l_zp;
}

double tilt_from_eta1(double eta1, double wavenumber, double l_zp) {
  const double s = eta1 / (2.0 * wavenumber * l_zp);
  if (!(eta1 > 0.0) || s > 1.0)
    throw Error(ErrorCategory::kValidation,
                fmt::format("infeasible geometry: eta1 = {} needs sin(theta) = {} (max eta1 = 2 k l_zp = {})",
                            eta1, s, 2.0 * wavenumber * l_zp));
  return std::asin(s);
}

double eta_x_from_misalignment(double misalignment, double wavenumber, double radius, double tilt) {
  return wavenumber * misalignment * std::sin(tilt) * radius;
}

double misalignment_from_eta_x(double eta_x, double wavenumber, double radius, double tilt) {
  return eta_x / (wavenumber * radius * std::sin(tilt));
}

double b1_from_waist(double waist, double raman_rabi, double radius) {
  if (std::isinf(waist)) return 0.0;
  return raman_rabi * radius * radius / (waist * waist);
}

double waist_from_b1(double b1, double raman_rabi, double radius) {
  if (b1 == 0.0) return kInfinity;
  if (b1 < 0.0) throw Error(ErrorCategory::kValidation, "B1 from a Raman waist must be positive");
  return radius * std::sqrt(raman_rabi / b1);
}

double tuned_beatnote(double raman_rabi, double omega1, double rotation, double delta1) {
  return raman_rabi + omega1 + rotation - delta1;
}

namespace {

double cm_frequency(const TrapConfig& trap, const ModeData& modes) {
  return modes.size() ? modes.frequencies[0] : trap.axial_freq;
}

}  // namespace

DerivedModel derive_model(const TrapConfig& trap, const BeamConfig& beams,
                          const CrystalLayout& layout, const ModeData& modes,
                          const ScatteringRates& rates) {
  beams.validate();
  DerivedModel d;
  d.N = layout.size();
  d.radius = layout.radius;
  d.omega1 = cm_frequency(trap, modes);
  d.l_zp = zero_point_length(trap.ion_mass, d.omega1);
  d.dk_z = 2.0 * beams.wavenumber * std::sin(beams.tilt);
  d.dk_x = beams.wavenumber * beams.misalignment * std::sin(beams.tilt);
  d.eta1 = d.dk_z * d.l_zp;
  d.eta_x = d.dk_x * d.radius;
  d.G = beams.delta_ac * d.eta1 * d.eta_x / 4.0;
  d.delta1 = beams.raman_rabi - beams.beatnote + d.omega1 + trap.rotation_freq;
  d.J = d.delta1 != 0.0 ? d.G * d.G / d.delta1 : std::nan("");
  d.B1 = b1_from_waist(beams.raman_waist, beams.raman_rabi, d.radius);
  d.K = d.N ? d.B1 - d.J / static_cast<double>(d.N) : d.B1;
  d.doppler = doppler_b1(beams, d.radius);
  d.budget = scattering_budget(rates.odf, rates.raman, d.J);
  return d;
}

BeamConfig design_beams(const TrapConfig& trap, double radius, double omega1,
                        const DesignTargets& t) {
  BeamConfig b;
  b.wavenumber = t.wavenumber;
  b.delta_ac = t.delta_ac;
  b.raman_rabi = t.raman_rabi;
  b.spin_splitting = t.spin_splitting;
  b.raman_tilt = t.raman_tilt;
  const double l = zero_point_length(trap.ion_mass, omega1);
  b.tilt = tilt_from_eta1(t.eta1, t.wavenumber, l);
  b.misalignment = misalignment_from_eta_x(t.eta_x, t.wavenumber, radius, b.tilt);
  b.beatnote = tuned_beatnote(t.raman_rabi, omega1, trap.rotation_freq, t.delta1);
  const double G = t.delta_ac * t.eta1 * t.eta_x / 4.0;
  const double J = G * G / t.delta1;
  b.raman_waist = waist_from_b1(t.b1_over_j * J, t.raman_rabi, radius);
  return b;
}

// ---------------------------------------------------------------------------

const RwaRow& RwaTable::row(const std::string& name) const {
  for (const auto& r : rows)
    if (r.name == name) return r;
  throw Error(ErrorCategory::kValidation, "no resonance row named " + name);
}

RwaTable rwa_table(const TrapConfig& trap, const BeamConfig& beams, const ModeData& modes) {
  if (modes.size() == 0) throw Error(ErrorCategory::kValidation, "resonance table needs mode data");
  const double b0 = beams.raman_rabi, mu = beams.beatnote, wr = trap.rotation_freq;
  const auto& w = modes.frequencies;
  const double wmin = *std::min_element(w.begin(), w.end());
  const double wmax = *std::max_element(w.begin(), w.end());
  // spectrum without the c.m. mode
  double wmax_rel = -kInfinity, wmin_rel = kInfinity;
  for (std::size_t n = 1; n < w.size(); ++n) {
    wmax_rel = std::max(wmax_rel, w[n]);
    wmin_rel = std::min(wmin_rel, w[n]);
  }
  // every row is B0 + a mu + (linear in the mode frequencies), so extremes
  // over the spectrum sit at its ends
  RwaTable t;
  t.label = trap.label;
  // {a, b, c}: B0 + a mu + b x + c y
  static constexpr std::array<std::array<int, 3>, 8> kSigns = {{{-1, 1, 1}, {-1, 1, -1},
                                                                {-1, -1, 1}, {-1, -1, -1},
                                                                {1, 1, 1}, {1, 1, -1},
                                                                {1, -1, 1}, {1, -1, -1}}};
  auto push = [&](std::string name, double lo, double hi) {
    t.rows.push_back({std::move(name), std::min(lo, hi), std::max(lo, hi)});
  };
  auto range = [](int sign, double lo, double hi) {
    return sign > 0 ? std::array<double, 2>{lo, hi} : std::array<double, 2>{-hi, -lo};
  };
  for (int i = 0; i < 8; ++i) {
    const auto [a, b, c] = kSigns[i];
    const double base = b0 + a * mu + c * wr;
    const auto x = i == 0 && w.size() > 1 ? range(b, wmin_rel, wmax_rel) : range(b, wmin, wmax);
    push(fmt::format("T1{}", i + 1), base + x[0], base + x[1]);
  }
  for (int i = 0; i < 8; ++i) {
    const auto [a, b, c] = kSigns[i];
    const auto x = range(b, wmin, wmax), y = range(c, wmin, wmax);
    const double base = b0 + a * mu;
    push(fmt::format("T2{}", i + 1), base + x[0] + y[0], base + x[1] + y[1]);
  }
  for (int i = 0; i < 8; ++i) {
    const auto [a, b, c] = kSigns[i];
    const double v = b0 + a * mu + b * wr + c * wr;
    push(fmt::format("T3{}", i + 1), v, v);
  }
  push("T41", b0 + mu, b0 + mu);
  push("T42", b0 - mu, b0 - mu);
  static constexpr std::array<std::array<int, 2>, 4> kPairs = {{{-1, 1}, {-1, -1}, {1, 1}, {1, -1}}};
  for (int i = 0; i < 4; ++i) {
    const auto [a, b] = kPairs[i];
    const auto x = range(b, wmin, wmax);
    push(fmt::format("T5{}", i + 1), b0 + a * mu + x[0], b0 + a * mu + x[1]);
  }
  for (int i = 0; i < 4; ++i) {
    const auto [a, b] = kPairs[i];
    const double v = b0 + a * mu + b * wr;
    push(fmt::format("T6{}", i + 1), v, v);
  }
  return t;
}

std::string format_rwa_table(const RwaTable& t) {
  std::string out = fmt::format("resonance table{} (kHz)\n{:<6} {:>12} {:>12}\n",
                                t.label.empty() ? "" : ", " + t.label, "term", "min", "max");
  for (const auto& r : t.rows)
    out += fmt::format("{:<6} {:>12.1f} {:>12.1f}\n", r.name, to_hz(r.min) * 1e-3, to_hz(r.max) * 1e-3);
  return out;
}

std::string format_rwa_csv(const RwaTable& t) {
  std::string out = "term,min_khz,max_khz\n";
  for (const auto& r : t.rows)
    out += fmt::format("{},{:.6f},{:.6f}\n", r.name, to_hz(r.min) * 1e-3, to_hz(r.max) * 1e-3);
  return out;
}

std::string format_derived_model(const DerivedModel& d) {
  std::string s;
  auto line = [&](const char* name, const std::string& v) { s += fmt::format("{:<22} {}\n", name, v); };
  line("N", fmt::format("{}", d.N));
  line("R", fmt::format("{:.3f} um", d.radius * 1e6));
  line("omega_1/2pi", fmt::format("{:.4f} MHz", to_hz(d.omega1) * 1e-6));
  line("l_zp", fmt::format("{:.4f} nm", d.l_zp * 1e9));
  line("eta_1", fmt::format("{:.5f}", d.eta1));
  line("eta_x", fmt::format("{:.5f}", d.eta_x));
  line("G/2pi", fmt::format("{:.3f} Hz", to_hz(d.G)));
  line("delta_1/2pi", fmt::format("{:.3f} Hz", to_hz(d.delta1)));
  line("J/2pi", fmt::format("{:.3f} Hz", to_hz(d.J)));
  line("B_1/2pi", fmt::format("{:.3f} Hz", to_hz(d.B1)));
  line("K/2pi", fmt::format("{:.3f} Hz", to_hz(d.K)));
  line("eta_R (max)", fmt::format("{:.4f}{}", d.doppler.eta_r_max, d.doppler.valid ? "" : "  (outside small-eta regime)"));
  line("Doppler B_1/2pi", fmt::format("{:.3f} Hz", to_hz(d.doppler.b1)));
  line("Gamma_ODF/2pi", fmt::format("{:.2f} Hz", to_hz(d.budget.gamma_odf)));
  line("Gamma_Raman/2pi", fmt::format("{:.2f} Hz", to_hz(d.budget.gamma_raman)));
  line("Gamma_tot/2pi", fmt::format("{:.2f} Hz", to_hz(d.budget.gamma_tot)));
  line("Jt budget", d.budget.unbounded() ? std::string("unbounded") : fmt::format("{:.3f}", d.budget.jt_budget));
  return s;
}

// ---------------------------------------------------------------------------

const char* coupling_name(CouplingKind k) {
  switch (k) {
    case CouplingKind::kJ5: return "J5";
    case CouplingKind::kJ11: return "J11";
    case CouplingKind::kJ12: return "J12";
  }
  return "?";
}

namespace {

struct ModeTerms {
  double eta;      ///< Lamb-Dicke parameter of mode n
  double delta_n;  ///< B0 - mu_r + omega_n + omega_r
};

ModeTerms mode_terms(std::size_t n, const ModeData& modes, const TrapConfig& trap,
                     const BeamConfig& beams, const DerivedModel& d) {
  const double w = modes.frequencies[n];
  return {d.dk_z * zero_point_length(trap.ion_mass, w),
          beams.raman_rabi - beams.beatnote + w + trap.rotation_freq};
}

void guard(double den, std::size_t n, const char* term, CouplingKind k) {
  if (std::abs(den) < kGuardBand)
    throw Error(ErrorCategory::kNumerical,
                fmt::format("accidental resonance in {}: mode {} has {} = 2pi x {:.2f} Hz, inside the "
                            "2pi x {:.0f} Hz guard band",
                            coupling_name(k), n, term, to_hz(den), to_hz(kGuardBand)));
}

void check_inputs(const CrystalLayout& layout, const ModeData& modes) {
  if (modes.size() == 0 || static_cast<std::size_t>(modes.vectors.rows()) != layout.size() ||
      static_cast<std::size_t>(modes.vectors.cols()) != modes.size())
    throw Error(ErrorCategory::kValidation, "mode data does not match the crystal layout");
}

}  // namespace

Eigen::MatrixXcd mode_coupling(CouplingKind kind, std::size_t n, const CrystalLayout& layout,
                               const ModeData& modes, const TrapConfig& trap,
                               const BeamConfig& beams, const DerivedModel& d) {
  check_inputs(layout, modes);
  if (n >= modes.size()) throw Error(ErrorCategory::kValidation, "mode index out of range");
  const Eigen::Index N = static_cast<Eigen::Index>(layout.size());
  const auto [eta, dn] = mode_terms(n, modes, trap, beams, d);
  const double dac2 = beams.delta_ac * beams.delta_ac;
  const double b0 = beams.raman_rabi, wr = trap.rotation_freq;
  const auto M = modes.vectors.col(static_cast<Eigen::Index>(n));
  Eigen::MatrixXcd out(N, N);
  switch (kind) {
    case CouplingKind::kJ5: {
      const double den = beams.beatnote - modes.frequencies[n];
      guard(den, n, "mu_r - omega_n", kind);
      const double c = dac2 * eta * eta;
      for (Eigen::Index j = 0; j < N; ++j)
        for (Eigen::Index k = 0; k < N; ++k)
          out(j, k) = j == k ? c * b0 * M[j] * M[j] / (2.0 * den * den)
                             : c * M[j] * M[k] / (2.0 * den);
      break;
    }
    case CouplingKind::kJ11:
    case CouplingKind::kJ12: {
      const bool anti = kind == CouplingKind::kJ11;
      const double d_a = anti ? dn - 2.0 * b0 : dn;  // diagonal denominator
      guard(dn - 2.0 * wr, n, "delta_n - 2 omega_r", kind);
      guard(d_a, n, anti ? "delta_n - 2 B_0" : "delta_n", kind);
      const double c = dac2 * d.eta_x * d.eta_x * eta * eta / 16.0;
      const double bracket = 1.0 / d_a + 1.0 / (dn - 2.0 * wr);
      const double sign = anti ? 1.0 : -1.0;
      for (Eigen::Index j = 0; j < N; ++j) {
        const double rj = layout.r_norm[j];
        for (Eigen::Index k = 0; k < N; ++k) {
          const double rk = layout.r_norm[k];
          if (j == k) {
            out(j, k) = sign * c * rj * rj * M[j] * M[j] / d_a;
          } else {
            const double dphi = layout.phi[j] - layout.phi[k];
            out(j, k) = -c * rj * rk * M[j] * M[k] * bracket * std::polar(1.0, anti ? dphi : -dphi);
          }
        }
      }
      break;
    }
  }
  return out;
}

Eigen::MatrixXcd resonant_chiral_part(const CrystalLayout& layout, const ModeData& modes,
                                      const TrapConfig& trap, const BeamConfig& beams,
                                      const DerivedModel& d) {
  check_inputs(layout, modes);
  const Eigen::Index N = static_cast<Eigen::Index>(layout.size());
  const auto [eta, dn] = mode_terms(0, modes, trap, beams, d);
  const double c = beams.delta_ac * beams.delta_ac * d.eta_x * d.eta_x * eta * eta / 16.0 / dn;
  const auto M = modes.vectors.col(0);
  Eigen::MatrixXcd out(N, N);
  for (Eigen::Index j = 0; j < N; ++j)
    for (Eigen::Index k = 0; k < N; ++k)
      out(j, k) = -c * layout.r_norm[j] * layout.r_norm[k] * M[j] * M[k] *
                  std::polar(1.0, -(layout.phi[j] - layout.phi[k]));
  return out;
}

OffResonantCouplings offresonant_couplings(const CrystalLayout& layout, const ModeData& modes,
                                           const TrapConfig& trap, const BeamConfig& beams,
                                           const DerivedModel& d) {
  check_inputs(layout, modes);
  const Eigen::Index N = static_cast<Eigen::Index>(layout.size());
  OffResonantCouplings c;
  c.j5 = Eigen::MatrixXcd::Zero(N, N);
  c.j11 = Eigen::MatrixXcd::Zero(N, N);
  c.j12 = Eigen::MatrixXcd::Zero(N, N);
  for (std::size_t n = 0; n < modes.size(); ++n) {
    c.j5 += mode_coupling(CouplingKind::kJ5, n, layout, modes, trap, beams, d);
    c.j11 += mode_coupling(CouplingKind::kJ11, n, layout, modes, trap, beams, d);
    if (n == 0) {
      // the resonant c.m. exchange is the one-channel model itself; only the
      // counter-rotating partner survives
      c.j12 += mode_coupling(CouplingKind::kJ12, 0, layout, modes, trap, beams, d) -
               resonant_chiral_part(layout, modes, trap, beams, d);
    } else {
      c.j12 += mode_coupling(CouplingKind::kJ12, n, layout, modes, trap, beams, d);
    }
  }
  const double mu = beams.beatnote, wr = trap.rotation_freq, b0 = beams.raman_rabi;
  const double dac2 = beams.delta_ac * beams.delta_ac;
  for (double den : {mu, mu + wr, mu - wr})
    if (std::abs(den) < kGuardBand)
      throw Error(ErrorCategory::kNumerical,
                  fmt::format("accidental resonance in the single-spin Stark shift: denominator "
                              "2pi x {:.2f} Hz",
                              to_hz(den)));
  const double h4 = dac2 * b0 / (mu * mu);
  const double h6 = dac2 * b0 * d.eta_x * d.eta_x / 4.0 *
                    (1.0 / ((mu + wr) * (mu + wr)) + 1.0 / ((mu - wr) * (mu - wr)));
  c.z_shift.resize(layout.size());
  for (std::size_t j = 0; j < layout.size(); ++j)
    c.z_shift[j] = h4 + h6 * layout.r_norm[j] * layout.r_norm[j];
  return c;
}

}  // namespace pwave
