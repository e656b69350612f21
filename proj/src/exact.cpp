#include "pwave/exact.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace pwave {

RingBasis RingBasis::make(const RingCrystalSpec& spec, long long max_dimension) {
  RingBasis b;
  b.spec = spec;
  long double dim = 1.0L;
  for (int n : spec.populations) dim *= static_cast<long double>(n + 1);
  if (dim > static_cast<long double>(max_dimension)) {
    std::ostringstream os;
    os << "ring basis with M = " << spec.rings << " has dimension " << static_cast<double>(dim)
       << ", above the limit " << max_dimension;
    throw Error(ErrorCategory::kCapability, os.str());
  }
  b.dimension = 1;
  // ring 0 varies slowest
  b.dims.resize(spec.rings);
  b.strides.resize(spec.rings);
  for (int m = spec.rings - 1; m >= 0; --m) {
    b.dims[m] = spec.populations[m] + 1;
    b.strides[m] = b.dimension;
    b.dimension *= b.dims[m];
  }
  return b;
}

long long RingBasis::index(const std::vector<int>& k) const {
  long long i = 0;
  for (std::size_t m = 0; m < k.size(); ++m) i += k[m] * strides[m];
  return i;
}

std::vector<int> RingBasis::occupations(long long index) const {
  std::vector<int> k(dims.size());
  for (std::size_t m = 0; m < dims.size(); ++m) k[m] = static_cast<int>((index / strides[m]) % dims[m]);
  return k;
}

namespace {

SparseMatrix ring_operator(const RingBasis& b, int ring, int shift) {
  const int n = b.spec.populations[ring];
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(b.dimension);
  for (long long i = 0; i < b.dimension; ++i) {
    const int k = static_cast<int>((i / b.strides[ring]) % b.dims[ring]);
    if (shift == 0) {
      trip.emplace_back(i, i, k - 0.5 * n);
    } else if (shift > 0 && k < n) {
      trip.emplace_back(i + b.strides[ring], i, std::sqrt(static_cast<double>((k + 1) * (n - k))));
    } else if (shift < 0 && k > 0) {
      trip.emplace_back(i - b.strides[ring], i, std::sqrt(static_cast<double>(k * (n - k + 1))));
    }
  }
  SparseMatrix m(b.dimension, b.dimension);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

}  // namespace

SparseMatrix ring_jz(const RingBasis& b, int ring) { return ring_operator(b, ring, 0); }
SparseMatrix ring_jplus(const RingBasis& b, int ring) { return ring_operator(b, ring, +1); }
SparseMatrix ring_jminus(const RingBasis& b, int ring) { return ring_operator(b, ring, -1); }

SparseMatrix ring_lowering(const RingBasis& b) {
  SparseMatrix l(b.dimension, b.dimension);
  for (int m = 0; m < b.spec.rings; ++m) {
    if (b.spec.radii[m] == 0.0) continue;
    l += b.spec.radii[m] * ring_jminus(b, m);
  }
  return l;
}

SparseMatrix build_ring_hamiltonian(const RingBasis& b, const OneChannelParams& p) {
  const double n = static_cast<double>(b.spec.total());
  const double b1 = p.K + p.J / n;
  SparseMatrix l = ring_lowering(b);
  SparseMatrix h = SparseMatrix(l.transpose()) * l;
  h *= -p.J / n;
  for (int m = 0; m < b.spec.rings; ++m) {
    const double r = b.spec.radii[m];
    if (r == 0.0) continue;
    h += (b1 * r * r) * ring_jz(b, m);
  }
  h.prune(0.0);
  return h;
}

ExactState ring_coherent_state(const RingBasis& b, const std::vector<double>& theta,
                               const std::vector<double>& chi) {
  const int rings = b.spec.rings;
  if (static_cast<int>(theta.size()) != rings || static_cast<int>(chi.size()) != rings)
    throw Error(ErrorCategory::kValidation, "need one polar angle and azimuth per ring");
  std::vector<std::vector<cplx>> amp(rings);
  for (int m = 0; m < rings; ++m) {
    const int n = b.spec.populations[m];
    const double c = std::cos(0.5 * theta[m]), s = std::sin(0.5 * theta[m]);
    amp[m].resize(n + 1);
    for (int k = 0; k <= n; ++k) {
      const double logc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
      // cos^k (e^{i chi} sin)^{n-k}, guarding 0^0
      const double mag = std::exp(0.5 * logc) * (k ? std::pow(c, k) : 1.0) *
                         (n - k ? std::pow(s, n - k) : 1.0);
      amp[m][k] = mag * std::polar(1.0, chi[m] * (n - k));
    }
  }
  ExactState psi(b.dimension);
  for (long long i = 0; i < b.dimension; ++i) {
    cplx a = 1.0;
    for (int m = 0; m < rings; ++m) a *= amp[m][(i / b.strides[m]) % b.dims[m]];
    psi[i] = a;
  }
  return psi;
}

ExactState ring_bcs_state(const RingBasis& b) {
  std::vector<double> theta(b.spec.rings), chi(b.spec.rings, -0.5 * kPi);
  for (int m = 0; m < b.spec.rings; ++m) theta[m] = kPi * b.spec.radii[m];
  return ring_coherent_state(b, theta, chi);
}

namespace {

// Lanczos on a Hermitian (real symmetric) operator. Returns false if the
// error estimate exceeds the tolerance.
bool lanczos_step(const SparseMatrix& h, const ExactState& v, double dt, const KrylovOptions& opt,
                  ExactState& out) {
  const double beta0 = v.norm();
  if (beta0 == 0.0) {
    out = v;
    return true;
  }
  const int mmax = std::max(2, std::min<int>(opt.max_dimension, static_cast<int>(v.size())));
  std::vector<ExactState> basis;
  basis.reserve(mmax + 1);
  basis.push_back(v / beta0);
  std::vector<double> alpha, beta;
  ExactState w;
  int m = 0;
  bool breakdown = false;
  for (; m < mmax; ++m) {
    w = h * basis[m];
    const double a = basis[m].dot(w).real();
    alpha.push_back(a);
    // full reorthogonalization
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i <= m; ++i) w -= basis[i].dot(w) * basis[i];
    const double bnext = w.norm();
    if (bnext < 1e-14 * std::max(1.0, std::abs(a))) {
      breakdown = true;
      ++m;
      break;
    }
    beta.push_back(bnext);
    basis.push_back(w / bnext);
  }
  if (!breakdown) m = mmax;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    t(i, i) = alpha[i];
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  Eigen::VectorXcd y(m);
  {
    const auto& q = es.eigenvectors();
    Eigen::VectorXcd phase(m);
    for (int i = 0; i < m; ++i) phase[i] = std::polar(1.0, -es.eigenvalues()[i] * dt) * q(0, i);
    y = q.cast<cplx>() * phase;
  }
  if (!breakdown) {
    const double err = beta0 * beta[m - 1] * std::abs(y[m - 1]);
    if (err > opt.tolerance) return false;
  }
  out = ExactState::Zero(v.size());
  for (int i = 0; i < m; ++i) out += (beta0 * y[i]) * basis[i];
  return true;
}

}  // namespace

ExactState krylov_propagate(const SparseMatrix& h, const ExactState& v, double dt,
                            const KrylovOptions& opt) {
  ExactState cur = v, next;
  double remaining = dt, step = dt;
  int guard = 0;
  while (remaining > 0.0) {
    step = std::min(step, remaining);
    if (lanczos_step(h, cur, step, opt, next)) {
      cur = next;
      remaining -= step;
      if (remaining < 1e-15 * std::abs(dt)) break;
    } else {
      step *= 0.5;
      if (++guard > 200)
        throw Error(ErrorCategory::kNumerical, "Krylov propagation failed to meet the tolerance");
    }
  }
  return cur;
}

TimeSeries evolve_exact(const ExactState& psi0, const RingBasis& b, const OneChannelParams& p,
                        const std::vector<double>& times, const KrylovOptions& opt) {
  if (std::abs(psi0.norm() - 1.0) > 1e-10)
    throw Error(ErrorCategory::kValidation, "initial state is not normalized");
  if (psi0.size() != b.dimension)
    throw Error(ErrorCategory::kValidation, "state dimension does not match the ring basis");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw Error(ErrorCategory::kValidation, "time grid must be strictly increasing");
  const int rings = b.spec.rings;
  const double n = static_cast<double>(b.spec.total());
  const SparseMatrix h = build_ring_hamiltonian(b, p);
  const SparseMatrix l = ring_lowering(b);
  std::vector<SparseMatrix> jm(rings), jz(rings);
  for (int m = 0; m < rings; ++m) {
    jm[m] = ring_jminus(b, m);
    jz[m] = ring_jz(b, m);
  }
  double shift = 0.0;  // site-resolved minus ring Hamiltonian
  for (int m = 0; m < rings; ++m)
    shift += 0.5 * p.J / n * b.spec.populations[m] * b.spec.radii[m] * b.spec.radii[m];

  TimeSeries ts;
  ts.solver = "exact";
  ExactState psi = psi0;
  double t = 0.0;
  double e0 = 0.0, x0 = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] > t) {
      psi = krylov_propagate(h, psi, times[i] - t, opt);
      t = times[i];
    }
    const double drift = std::abs(psi.norm() - 1.0);
    if (drift > opt.norm_tolerance) {
      std::ostringstream os;
      os << "norm drift " << drift << " at t = " << t << " exceeds " << opt.norm_tolerance;
      throw Error(ErrorCategory::kNumerical, os.str());
    }
    cplx psi_op = 0.0;
    double sz = 0.0, diag = 0.0;
    for (int m = 0; m < rings; ++m) {
      const double zm = psi.dot(jz[m] * psi).real();
      sz += zm;
      const double r = b.spec.radii[m];
      if (r == 0.0) continue;
      psi_op += r * psi.dot(jm[m] * psi);
      diag += r * r * (0.5 * b.spec.populations[m] + zm);
    }
    const double corr = (l * psi).squaredNorm() - diag;
    const double e = psi.dot(h * psi).real() + shift;
    if (i == 0) {
      e0 = e;
      x0 = sz;
    }
    ts.t.push_back(t);
    ts.psi.push_back(2.0 / n * psi_op);
    ts.psi_tilde.push_back(2.0 / n * std::sqrt(std::abs(corr)));
    if (corr < -1e-12) ++ts.diagnostics.negative_correlator_samples;
    ts.sz_total.push_back(sz);
    ts.energy.push_back(e);
    ts.n_cm.push_back(0.0);
    ts.diagnostics.max_norm_drift = std::max(ts.diagnostics.max_norm_drift, drift);
    ts.diagnostics.max_energy_drift =
        std::max(ts.diagnostics.max_energy_drift, std::abs(e - e0) / std::max(1.0, std::abs(e0)));
    ts.diagnostics.max_sz_drift =
        std::max(ts.diagnostics.max_sz_drift, std::abs(sz - x0) / std::max(1.0, std::abs(x0)));
  }
  return ts;
}

}  // namespace pwave
