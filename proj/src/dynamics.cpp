#include "pwave/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

namespace pwave {

void OneChannelParams::validate() const {
  std::string msg;
  if (N < 2) msg += "; N must be >= 2";
  if (!(J >= 0.0)) msg += "; J must be >= 0";
  if (!std::isfinite(K) || !std::isfinite(J)) msg += "; K and J must be finite";
  if (!msg.empty()) throw Error(ErrorCategory::kValidation, "invalid one-channel parameters" + msg);
}

void TwoChannelParams::validate() const {
  std::string msg;
  if (N < 2) msg += "; N must be >= 2";
  if (!(G >= 0.0)) msg += "; G must be >= 0";
  if (!std::isfinite(B1) || !std::isfinite(delta1) || !std::isfinite(G))
    msg += "; B1, delta1 and G must be finite";
  if (!msg.empty()) throw Error(ErrorCategory::kValidation, "invalid two-channel parameters" + msg);
}

ExchangeTerms ExchangeTerms::from_couplings(const OffResonantCouplings& c, double unit,
                                            bool with_j12, bool with_j11, bool with_j5,
                                            bool with_shifts) {
  const Eigen::Index n = std::max({c.j5.rows(), c.j11.rows(), c.j12.rows(),
                                   static_cast<Eigen::Index>(c.z_shift.size())});
  ExchangeTerms t;
  t.exchange = Eigen::MatrixXcd::Zero(n, n);
  t.field = Eigen::VectorXd::Zero(n);
  auto add = [&](const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return;
    if (m.rows() != n || m.cols() != n)
      throw Error(ErrorCategory::kValidation, "coupling matrix has wrong dimension");
    t.exchange += m;
  };
  if (with_j12) add(c.j12);
  if (with_j11) add(c.j11);
  if (with_j5) add(c.j5);
  for (Eigen::Index j = 0; j < n; ++j) {
    // S+S- = 1/2 + S^Z on one site; the constant is dropped
    t.field[j] = t.exchange(j, j).real();
    t.exchange(j, j) = 0.0;
  }
  if (with_shifts && !c.z_shift.empty())
    for (Eigen::Index j = 0; j < n; ++j) t.field[j] += c.z_shift[j];
  t.exchange /= unit;
  t.field /= unit;
  return t;
}

Model Model::one_channel(double K, double J, std::size_t N) {
  Model m;
  m.kind = Kind::kOneChannel;
  m.one = {K, J, N};
  return m;
}

Model Model::two_channel(double B1, double delta1, double G, std::size_t N) {
  Model m;
  m.kind = Kind::kTwoChannel;
  m.two = {B1, delta1, G, N};
  return m;
}

void Model::validate() const {
  if (kind == Kind::kOneChannel) {
    one.validate();
    if (extra) {
      const auto n = static_cast<Eigen::Index>(one.N);
      if (extra->exchange.rows() != n || extra->exchange.cols() != n || extra->field.size() != n)
        throw Error(ErrorCategory::kValidation, "exchange terms do not match ion count");
    }
  } else {
    two.validate();
    if (extra)
      throw Error(ErrorCategory::kCapability,
                  "off-resonant exchange terms are supported for the one-channel model only");
  }
}

Model extend_with_offresonant(const Model& base, const ExchangeTerms& extra) {
  Model m = base;
  m.extra = extra;
  m.validate();
  return m;
}

void EvolveConfig::validate() const {
  std::string msg;
  if (!(step > 0.0)) msg += "; step must be > 0";
  if (!(t_end >= 0.0)) msg += "; t_end must be >= 0";
  if (output_every < 1) msg += "; output_every must be >= 1";
  if (n_traj < 1) msg += "; n_traj must be >= 1";
  for (double t : snapshot_times)
    if (t < 0.0 || t > t_end + 1e-12) msg += "; snapshot time outside [0, t_end]";
  if (!msg.empty()) throw Error(ErrorCategory::kValidation, "invalid evolve config" + msg);
}

std::vector<double> TimeSeries::abs_psi() const {
  std::vector<double> a(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) a[i] = std::abs(psi[i]);
  return a;
}

cplx order_parameter(const SpinConfiguration& s, const CrystalLayout& layout) {
  cplx acc = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j)
    acc += layout.r_norm[j] * std::polar(1.0, layout.phi[j]) * s.s_minus(j);
  return 2.0 / static_cast<double>(s.size()) * acc;
}

double pair_correlator(const SpinConfiguration& s, const CrystalLayout& layout) {
  cplx a = 0.0;
  double diag = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    const cplx v = layout.r_norm[j] * std::polar(1.0, -layout.phi[j]) * s.s_plus(j);
    a += v;
    diag += std::norm(v);
  }
  return std::norm(a) - diag;
}

namespace {

// Packed layout: y[3j..3j+2] spin j, y[3N], y[3N+1] alpha.
struct Kernel {
  const CrystalLayout& layout;
  const Model& model;
  std::size_t n;
  std::vector<double> r, r2;
  std::vector<cplx> eiphi;  // r e^{i phi}
  mutable Eigen::VectorXcd sminus, w;

  Kernel(const CrystalLayout& l, const Model& m) : layout(l), model(m), n(l.size()) {
    r.resize(n);
    r2.resize(n);
    eiphi.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      r[j] = l.r_norm[j];
      r2[j] = r[j] * r[j];
      eiphi[j] = std::polar(r[j], l.phi[j]);
    }
    if (m.extra) {
      sminus.resize(n);
      w.resize(n);
    }
  }

  std::size_t dim() const { return 3 * n + 2; }

  void rhs(const double* y, double* dy) const {
    if (model.kind == Model::Kind::kOneChannel)
      rhs_one(y, dy);
    else
      rhs_two(y, dy);
  }

  void rhs_one(const double* y, double* dy) const {
    const double K = model.one.K, J = model.one.J;
    const double two_over_n = 2.0 / static_cast<double>(n);
    cplx A = 0.0;  // sum r e^{-i phi} s^+
    for (std::size_t j = 0; j < n; ++j) A += std::conj(eiphi[j]) * cplx(y[3 * j], y[3 * j + 1]);
    const bool ext = model.extra.has_value();
    if (ext) {
      for (std::size_t j = 0; j < n; ++j) sminus[j] = cplx(y[3 * j], -y[3 * j + 1]);
      w.noalias() = model.extra->exchange * sminus;
    }
    for (std::size_t j = 0; j < n; ++j) {
      const cplx sp(y[3 * j], y[3 * j + 1]);
      const double sz = y[3 * j + 2];
      const cplx psi_star = two_over_n * (A - std::conj(eiphi[j]) * sp);
      cplx dsp = cplx(0.0, K * r2[j]) * sp + cplx(0.0, J * sz) * eiphi[j] * psi_star;
      double dsz = -J * std::imag(sp * std::conj(eiphi[j]) * std::conj(psi_star));
      if (ext) {
        const double h = model.extra->field[j];
        dsp += cplx(0.0, -2.0 * sz) * std::conj(w[j]) + cplx(0.0, h) * sp;
        dsz += 2.0 * std::imag(sp * w[j]);
      }
      dy[3 * j] = dsp.real();
      dy[3 * j + 1] = dsp.imag();
      dy[3 * j + 2] = dsz;
    }
    dy[3 * n] = 0.0;
    dy[3 * n + 1] = 0.0;
  }

  void rhs_two(const double* y, double* dy) const {
    const auto& p = model.two;
    const double sqn = std::sqrt(static_cast<double>(n));
    const double g = 2.0 * p.G / sqn;
    const cplx alpha(y[3 * n], y[3 * n + 1]);
    cplx psi = 0.0;
    for (std::size_t j = 0; j < n; ++j) psi += eiphi[j] * cplx(y[3 * j], -y[3 * j + 1]);
    psi *= 2.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
      const cplx sp(y[3 * j], y[3 * j + 1]);
      const double sz = y[3 * j + 2];
      const cplx dsp = cplx(0.0, p.B1 * r2[j]) * sp + g * std::conj(alpha) * sz * eiphi[j];
      const double dsz = -g * std::real(sp * alpha * std::conj(eiphi[j]));
      dy[3 * j] = dsp.real();
      dy[3 * j + 1] = dsp.imag();
      dy[3 * j + 2] = dsz;
    }
    const cplx da = cplx(0.0, -p.delta1) * alpha + 0.5 * sqn * p.G * psi;
    dy[3 * n] = da.real();
    dy[3 * n + 1] = da.imag();
  }

  double energy(const double* y) const {
    double e = 0.0;
    if (model.kind == Model::Kind::kOneChannel) {
      const double K = model.one.K, J = model.one.J;
      cplx A = 0.0;
      double diag = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const cplx v = std::conj(eiphi[j]) * cplx(y[3 * j], y[3 * j + 1]);
        A += v;
        diag += std::norm(v);
        e += K * r2[j] * y[3 * j + 2];
      }
      e -= J / static_cast<double>(n) * (std::norm(A) - diag);
      if (model.extra) {
        Eigen::VectorXcd sm(n);
        for (std::size_t j = 0; j < n; ++j) {
          sm[j] = cplx(y[3 * j], -y[3 * j + 1]);
          e += model.extra->field[j] * y[3 * j + 2];
        }
        e += std::real(sm.dot(model.extra->exchange * sm));  // dot conjugates its first argument: s^+ E s^-
      }
    } else {
      const auto& p = model.two;
      const cplx alpha(y[3 * n], y[3 * n + 1]);
      cplx psi = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        psi += eiphi[j] * cplx(y[3 * j], -y[3 * j + 1]);
        e += p.B1 * r2[j] * y[3 * j + 2];
      }
      psi *= 2.0 / static_cast<double>(n);
      e += p.delta1 * std::norm(alpha) -
           p.G * std::sqrt(static_cast<double>(n)) * std::imag(std::conj(alpha) * psi);
    }
    return e;
  }

  double conserved_number(const double* y) const {
    double x = 0.0;
    for (std::size_t j = 0; j < n; ++j) x += y[3 * j + 2];
    if (model.kind == Model::Kind::kTwoChannel) x += y[3 * n] * y[3 * n] + y[3 * n + 1] * y[3 * n + 1];
    return x;
  }
};

std::vector<double> pack(const SpinConfiguration& s, cplx alpha) {
  std::vector<double> y(3 * s.size() + 2);
  for (std::size_t j = 0; j < s.size(); ++j) {
    y[3 * j] = s.spins[j].x();
    y[3 * j + 1] = s.spins[j].y();
    y[3 * j + 2] = s.spins[j].z();
  }
  y[3 * s.size()] = alpha.real();
  y[3 * s.size() + 1] = alpha.imag();
  return y;
}

SpinConfiguration unpack(const std::vector<double>& y, std::size_t n, bool with_alpha) {
  SpinConfiguration s;
  s.spins.resize(n);
  for (std::size_t j = 0; j < n; ++j) s.spins[j] = Vec3(y[3 * j], y[3 * j + 1], y[3 * j + 2]);
  if (with_alpha) s.alpha = cplx(y[3 * n], y[3 * n + 1]);
  return s;
}

struct Schedule {
  long long steps = 0;
  std::vector<long long> sample_steps;
  std::vector<long long> snapshot_steps;
};

Schedule make_schedule(const EvolveConfig& cfg) {
  Schedule s;
  s.steps = static_cast<long long>(std::ceil(cfg.t_end / cfg.step - 1e-9));
  for (long long k = 0; k <= s.steps; k += cfg.output_every) s.sample_steps.push_back(k);
  if (s.sample_steps.back() != s.steps) s.sample_steps.push_back(s.steps);
  for (double t : cfg.snapshot_times)
    s.snapshot_steps.push_back(std::min(s.steps, std::llround(t / cfg.step)));
  return s;
}

// Per-trajectory record at every sample.
struct TrajRecord {
  std::vector<cplx> psi;
  std::vector<double> corr, sz, energy, alpha2;
  std::vector<std::vector<Vec3>> snaps;
  double norm_drift = 0.0, number_drift = 0.0, energy_drift = 0.0;
};

TrajRecord run_trajectory(const Kernel& k, std::vector<double> y, const Schedule& sch,
                          double dt) {
  const std::size_t n = k.n, dim = k.dim();
  TrajRecord rec;
  rec.psi.reserve(sch.sample_steps.size());
  rec.snaps.resize(sch.snapshot_steps.size());
  std::vector<double> norm0(n);
  for (std::size_t j = 0; j < n; ++j)
    norm0[j] = std::sqrt(y[3 * j] * y[3 * j] + y[3 * j + 1] * y[3 * j + 1] + y[3 * j + 2] * y[3 * j + 2]);
  const double e0 = k.energy(y.data());
  const double x0 = k.conserved_number(y.data());
  const double escale = std::max(std::abs(e0), 1.0), xscale = std::max(std::abs(x0), 1.0);

  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  std::size_t next_sample = 0;
  auto observe = [&](long long step) {
    while (next_sample < sch.sample_steps.size() && sch.sample_steps[next_sample] == step) {
      cplx a = 0.0, psi = 0.0;
      double diag = 0.0, sz = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const cplx sp(y[3 * j], y[3 * j + 1]);
        const cplx v = std::conj(k.eiphi[j]) * sp;
        a += v;
        diag += std::norm(v);
        psi += std::conj(v);
        sz += y[3 * j + 2];
        const double nj = std::sqrt(std::norm(sp) + y[3 * j + 2] * y[3 * j + 2]);
        rec.norm_drift = std::max(rec.norm_drift, std::abs(nj - norm0[j]));
      }
      rec.psi.push_back(2.0 / static_cast<double>(n) * psi);
      rec.corr.push_back(std::norm(a) - diag);
      rec.sz.push_back(sz);
      const double e = k.energy(y.data());
      rec.energy.push_back(e);
      rec.alpha2.push_back(y[3 * n] * y[3 * n] + y[3 * n + 1] * y[3 * n + 1]);
      rec.energy_drift = std::max(rec.energy_drift, std::abs(e - e0) / escale);
      rec.number_drift =
          std::max(rec.number_drift, std::abs(k.conserved_number(y.data()) - x0) / xscale);
      ++next_sample;
    }
    for (std::size_t i = 0; i < sch.snapshot_steps.size(); ++i) {
      if (sch.snapshot_steps[i] != step) continue;
      auto& snap = rec.snaps[i];
      snap.resize(n);
      for (std::size_t j = 0; j < n; ++j) snap[j] = Vec3(y[3 * j], y[3 * j + 1], y[3 * j + 2]);
    }
  };

  observe(0);
  for (long long step = 1; step <= sch.steps; ++step) {
    k.rhs(y.data(), k1.data());
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    k.rhs(tmp.data(), k2.data());
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    k.rhs(tmp.data(), k3.data());
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + dt * k3[i];
    k.rhs(tmp.data(), k4.data());
    for (std::size_t i = 0; i < dim; ++i)
      y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    observe(step);
  }
  return rec;
}

TimeSeries evolve_impl(const SpinConfiguration& mean, const CrystalLayout& layout, const Model& m,
                       const EvolveConfig& cfg, bool stochastic, const char* solver) {
  cfg.validate();
  m.validate();
  if (mean.size() != layout.size() || m.size() != layout.size())
    throw Error(ErrorCategory::kValidation, "state, layout and model sizes differ");
  const Kernel kernel(layout, m);
  const Schedule sch = make_schedule(cfg);
  const std::size_t n_traj = stochastic ? cfg.n_traj : 1;
  const bool two = m.kind == Model::Kind::kTwoChannel;
  const cplx alpha0 = mean.alpha.value_or(cplx(0.0, 0.0));

  std::vector<TrajRecord> records(n_traj);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < n_traj; i = next++) {
      PhiloxStream rng(cfg.seed, i);
      SpinConfiguration s0 = (stochastic && cfg.sample_spins) ? sample_dtwa_spins(mean, rng) : mean;
      cplx a0 = alpha0;
      if (two && stochastic && cfg.sample_oscillator) a0 += sample_dtwa_oscillator(rng);
      records[i] = run_trajectory(kernel, pack(s0, a0), sch, cfg.step);
    }
  };
  unsigned nthreads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  nthreads = static_cast<unsigned>(std::min<std::size_t>(nthreads, n_traj));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // reduction in trajectory order
  TimeSeries ts;
  ts.solver = solver;
  const std::size_t ns = sch.sample_steps.size();
  const double inv = 1.0 / static_cast<double>(n_traj);
  const double two_over_n = 2.0 / static_cast<double>(layout.size());
  for (std::size_t k = 0; k < ns; ++k) {
    cplx psi = 0.0;
    double corr = 0.0, sz = 0.0, e = 0.0, a2 = 0.0;
    for (const auto& r : records) {
      psi += r.psi[k];
      corr += r.corr[k];
      sz += r.sz[k];
      e += r.energy[k];
      a2 += r.alpha2[k];
    }
    corr *= inv;
    if (corr < -1e-12) ++ts.diagnostics.negative_correlator_samples;
    const double c = cfg.clamp_negative_correlator ? std::max(corr, 0.0) : std::abs(corr);
    ts.t.push_back(static_cast<double>(sch.sample_steps[k]) * cfg.step);
    ts.psi.push_back(psi * inv);
    ts.psi_tilde.push_back(two_over_n * std::sqrt(c));
    ts.sz_total.push_back(sz * inv);
    ts.energy.push_back(e * inv);
    // Wigner symbol of a^dag a is |alpha|^2 - 1/2 when the vacuum is sampled
    const double shift = (two && stochastic && cfg.sample_oscillator) ? 0.5 : 0.0;
    ts.n_cm.push_back(two ? a2 * inv - shift : 0.0);
  }
  for (std::size_t i = 0; i < sch.snapshot_steps.size(); ++i) {
    Snapshot snap;
    snap.t = static_cast<double>(sch.snapshot_steps[i]) * cfg.step;
    snap.mean.spins.assign(layout.size(), Vec3::Zero());
    for (const auto& r : records)
      for (std::size_t j = 0; j < layout.size(); ++j) snap.mean.spins[j] += r.snaps[i][j];
    for (auto& v : snap.mean.spins) v *= inv;
    ts.snapshots.push_back(std::move(snap));
  }
  for (const auto& r : records) {
    ts.diagnostics.max_norm_drift = std::max(ts.diagnostics.max_norm_drift, r.norm_drift);
    ts.diagnostics.max_sz_drift = std::max(ts.diagnostics.max_sz_drift, r.number_drift);
    ts.diagnostics.max_energy_drift = std::max(ts.diagnostics.max_energy_drift, r.energy_drift);
  }
  ts.diagnostics.step_warning = ts.diagnostics.max_energy_drift > 1e-6;
  return ts;
}

}  // namespace

StateDerivative mf_rhs_one_channel(const SpinConfiguration& s, const CrystalLayout& layout,
                                   const OneChannelParams& p, const ExchangeTerms* extra) {
  Model m = Model::one_channel(p.K, p.J, p.N);
  if (extra) m.extra = *extra;
  const Kernel k(layout, m);
  const auto y = pack(s, 0.0);
  std::vector<double> dy(y.size());
  k.rhs(y.data(), dy.data());
  StateDerivative d;
  d.spins = unpack(dy, s.size(), false).spins;
  return d;
}

StateDerivative mf_rhs_two_channel(const SpinConfiguration& s, const CrystalLayout& layout,
                                   const TwoChannelParams& p) {
  const Model m = Model::two_channel(p.B1, p.delta1, p.G, p.N);
  const Kernel k(layout, m);
  const auto y = pack(s, s.alpha.value_or(0.0));
  std::vector<double> dy(y.size());
  k.rhs(y.data(), dy.data());
  StateDerivative d;
  d.spins = unpack(dy, s.size(), false).spins;
  d.alpha = cplx(dy[3 * s.size()], dy[3 * s.size() + 1]);
  return d;
}

double model_energy(const SpinConfiguration& s, const CrystalLayout& layout, const Model& m) {
  const Kernel k(layout, m);
  const auto y = pack(s, s.alpha.value_or(0.0));
  return k.energy(y.data());
}

std::array<Vec3, 3> spin_frame(const Vec3& v) {
  const double len = v.norm();
  if (!(len > 0.0)) throw Error(ErrorCategory::kNumerical, "cannot build a frame on a zero spin");
  const Vec3 par = v / len;
  // helper axis: the coordinate axis least aligned with par
  Eigen::Index imin = 0;
  par.cwiseAbs().minCoeff(&imin);
  Vec3 helper = Vec3::Zero();
  helper[imin] = 1.0;
  const Vec3 p1 = par.cross(helper).normalized();
  const Vec3 p2 = par.cross(p1);
  return {par, p1, p2};
}

SpinConfiguration sample_dtwa_spins(const SpinConfiguration& mean, PhiloxStream& rng) {
  SpinConfiguration out;
  out.alpha = mean.alpha;
  out.spins.resize(mean.size());
  for (std::size_t j = 0; j < mean.size(); ++j) {
    const auto f = spin_frame(mean.spins[j]);
    const double c1 = 0.5 * rng.sign();
    const double c2 = 0.5 * rng.sign();
    out.spins[j] = 0.5 * f[0] + c1 * f[1] + c2 * f[2];
  }
  return out;
}

cplx sample_dtwa_oscillator(PhiloxStream& rng) {
  const double re = 0.5 * rng.normal();
  const double im = 0.5 * rng.normal();
  return {re, im};
}

TimeSeries evolve_mf(const SpinConfiguration& s0, const CrystalLayout& layout, const Model& m,
                     const EvolveConfig& cfg) {
  return evolve_impl(s0, layout, m, cfg, false, "mf");
}

TimeSeries evolve_dtwa(const SpinConfiguration& mean, const CrystalLayout& layout, const Model& m,
                       const EvolveConfig& cfg) {
  return evolve_impl(mean, layout, m, cfg, true, "dtwa");
}

std::string format_timeseries_csv(const TimeSeries& ts) {
  std::ostringstream os;
  os << "t_dimensionless,Re_Psi,Im_Psi,abs_Psi,Psi_tilde,Sz_total,energy,n_cm\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < ts.size(); ++i)
    os << ts.t[i] << ',' << ts.psi[i].real() << ',' << ts.psi[i].imag() << ',' << std::abs(ts.psi[i])
       << ',' << ts.psi_tilde[i] << ',' << ts.sz_total[i] << ',' << ts.energy[i] << ','
       << ts.n_cm[i] << '\n';
  return os.str();
}

}  // namespace pwave
