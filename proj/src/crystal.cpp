#include "pwave/crystal.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace pwave {

const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kUsage: return "usage";
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kValidation: return "validation";
    case ErrorCategory::kParse: return "parse";
    case ErrorCategory::kNumerical: return "numerical";
    case ErrorCategory::kCapability: return "capability";
    case ErrorCategory::kIo: return "io";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Trap

double TrapConfig::radial_stiffness() const {
  return rotation_freq * (cyclotron_freq - rotation_freq) - 0.5 * axial_freq * axial_freq;
}

void TrapConfig::validate() const {
  std::vector<std::string> problems;
  if (!(rotation_freq > 0.0)) problems.push_back("rotation frequency must be positive");
  if (!(axial_freq > 0.0)) problems.push_back("axial frequency must be positive");
  if (!(ion_mass > 0.0)) problems.push_back("ion mass must be positive");
  if (ion_count < 1) problems.push_back("ion count must be at least 1");
  if (!(radial_stiffness() > 0.0))
    problems.push_back("radial confinement unstable: omega_r(omega_c - omega_r) - omega_z^2/2 <= 0");
  if (problems.empty()) return;
  std::string msg = "invalid trap configuration";
  for (const auto& p : problems) msg += "; " + p;
  throw Error(ErrorCategory::kValidation, msg);
}

TrapConfig TrapConfig::case_a(std::size_t ions) {
  TrapConfig t;
  t.rotation_freq = to_angular(180e3);
  t.axial_freq = to_angular(1.59e6);
  t.cyclotron_freq = constants::elementary_charge * 4.46 / constants::beryllium9_mass;
  t.ion_count = ions;
  t.label = "A";
  return t;
}

TrapConfig TrapConfig::case_b(std::size_t ions) {
  TrapConfig t = case_a(ions);
  t.rotation_freq = to_angular(900e3);
  t.axial_freq = to_angular(3.42e6);
  t.label = "B";
  return t;
}

double coulomb_length(const TrapConfig& trap) {
  const double kq2 = constants::coulomb_constant * constants::elementary_charge *
                     constants::elementary_charge;
  return std::cbrt(kq2 / (trap.ion_mass * trap.axial_freq * trap.axial_freq));
}

double confinement_ratio(const TrapConfig& trap) {
  return trap.radial_stiffness() / (trap.axial_freq * trap.axial_freq);
}

// ---------------------------------------------------------------------------
// Layout

CrystalLayout CrystalLayout::from_normalized(double radius_m, std::vector<double> xn,
                                             std::vector<double> yn) {
  if (xn.size() != yn.size())
    throw Error(ErrorCategory::kValidation, "layout coordinate arrays differ in length");
  CrystalLayout l;
  l.radius = radius_m;
  l.x = std::move(xn);
  l.y = std::move(yn);
  const std::size_t n = l.x.size();
  l.r_norm.resize(n);
  l.phi.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    l.r_norm[j] = std::hypot(l.x[j], l.y[j]);
    double p = std::atan2(l.y[j], l.x[j]);
    if (p <= -kPi) p = kPi;
    l.phi[j] = p;
  }
  return l;
}

CrystalLayout CrystalLayout::from_positions(const std::vector<double>& x_m,
                                            const std::vector<double>& y_m) {
  if (x_m.size() != y_m.size())
    throw Error(ErrorCategory::kValidation, "layout coordinate arrays differ in length");
  double R = 0.0;
  for (std::size_t j = 0; j < x_m.size(); ++j) R = std::max(R, std::hypot(x_m[j], y_m[j]));
  std::vector<double> xn(x_m.size()), yn(y_m.size());
  for (std::size_t j = 0; j < x_m.size(); ++j) {
    xn[j] = R > 0.0 ? x_m[j] / R : 0.0;
    yn[j] = R > 0.0 ? y_m[j] / R : 0.0;
  }
  return from_normalized(R, std::move(xn), std::move(yn));
}

void CrystalLayout::validate() const {
  const std::size_t n = x.size();
  if (y.size() != n || r_norm.size() != n || phi.size() != n)
    throw Error(ErrorCategory::kValidation, "layout arrays differ in length");
  if (!(radius >= 0.0) || !std::isfinite(radius))
    throw Error(ErrorCategory::kValidation, "layout radius must be finite and non-negative");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(x[j]) || !std::isfinite(y[j]))
      throw Error(ErrorCategory::kValidation, "non-finite coordinate for ion " + std::to_string(j));
    if (r_norm[j] > 1.0 + 1e-12) {
      std::ostringstream os;
      os << "normalized radius of ion " << j << " is " << std::setprecision(17) << r_norm[j]
         << " > 1";
      throw Error(ErrorCategory::kValidation, os.str());
    }
  }
}

// ---------------------------------------------------------------------------
// Rings

int hexagonal_count(int rings) { return 1 + 3 * rings * (rings - 1); }

RingCrystalSpec RingCrystalSpec::make(int rings) {
  if (rings < 1) throw Error(ErrorCategory::kValidation, "ring count must be >= 1");
  RingCrystalSpec s;
  s.rings = rings;
  for (int m = 1; m <= rings; ++m) {
    s.populations.push_back(6 * (m - 1) + (m == 1 ? 1 : 0));
    s.radii.push_back(rings > 1 ? static_cast<double>(m - 1) / (rings - 1) : 0.0);
  }
  return s;
}

int RingCrystalSpec::total() const {
  return std::accumulate(populations.begin(), populations.end(), 0);
}

int RingCrystalSpec::offset(int ring) const {
  return std::accumulate(populations.begin(), populations.begin() + ring, 0);
}

CrystalLayout make_ring_crystal(int rings, double radius_m) {
  const auto spec = RingCrystalSpec::make(rings);
  std::vector<double> xn, yn;
  xn.reserve(spec.total());
  yn.reserve(spec.total());
  for (int m = 0; m < rings; ++m) {
    const int nm = spec.populations[m];
    for (int i = 0; i < nm; ++i) {
      const double a = kTwoPi * i / nm;
      xn.push_back(spec.radii[m] * std::cos(a));
      yn.push_back(spec.radii[m] * std::sin(a));
    }
  }
  return CrystalLayout::from_normalized(radius_m, std::move(xn), std::move(yn));
}

// ---------------------------------------------------------------------------
// Equilibrium

namespace {

// Dimensionless energy for packed coordinates u = (x0, y0, x1, y1, ...).
struct PlanarPotential {
  double beta;
  std::size_t n;

  double value_and_gradient(const Eigen::VectorXd& u, Eigen::VectorXd& g) const {
    g.setZero(2 * n);
    double e = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double xj = u[2 * j], yj = u[2 * j + 1];
      e += 0.5 * beta * (xj * xj + yj * yj);
      g[2 * j] += beta * xj;
      g[2 * j + 1] += beta * yj;
      for (std::size_t k = j + 1; k < n; ++k) {
        const double dx = xj - u[2 * k], dy = yj - u[2 * k + 1];
        const double r2 = dx * dx + dy * dy;
        const double r = std::sqrt(r2);
        e += 1.0 / r;
        const double f = 1.0 / (r2 * r);
        g[2 * j] -= f * dx;
        g[2 * j + 1] -= f * dy;
        g[2 * k] += f * dx;
        g[2 * k + 1] += f * dy;
      }
    }
    return e;
  }

  Eigen::MatrixXd hessian(const Eigen::VectorXd& u) const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (std::size_t j = 0; j < 2 * n; ++j) h(j, j) = beta;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const double d[2] = {u[2 * j] - u[2 * k], u[2 * j + 1] - u[2 * k + 1]};
        const double r2 = d[0] * d[0] + d[1] * d[1];
        const double r = std::sqrt(r2);
        const double r5 = r2 * r2 * r;
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            const double v = (3.0 * d[a] * d[b] - (a == b ? r2 : 0.0)) / r5;
            h(2 * j + a, 2 * j + b) += v;
            h(2 * k + a, 2 * k + b) += v;
            h(2 * j + a, 2 * k + b) -= v;
            h(2 * k + a, 2 * j + b) -= v;
          }
        }
      }
    }
    return h;
  }
};

// Limited-memory BFGS with Armijo backtracking. Returns the final max-norm gradient.
double lbfgs(const PlanarPotential& pot, Eigen::VectorXd& u, double tol, int max_iter) {
  constexpr int kMemory = 12;
  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  Eigen::VectorXd g(u.size()), g_new(u.size());
  double f = pot.value_and_gradient(u, g);
  for (int it = 0; it < max_iter; ++it) {
    if (g.lpNorm<Eigen::Infinity>() < tol) break;
    // two-loop recursion
    Eigen::VectorXd q = g;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    double gamma = 1.0;
    if (!s_hist.empty()) gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    Eigen::VectorXd dir = gamma * q;
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double b = rho_hist[i] * y_hist[i].dot(dir);
      dir += s_hist[i] * (alpha[i] - b);
    }
    dir = -dir;
    double slope = g.dot(dir);
    if (slope >= 0.0) {
      dir = -g;
      slope = -g.squaredNorm();
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }
    // cap the step so no ion jumps by more than ~0.5 length units
    double step = 1.0;
    const double maxmove = dir.lpNorm<Eigen::Infinity>();
    if (maxmove * step > 0.5) step = 0.5 / maxmove;
    Eigen::VectorXd u_new;
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      u_new = u + step * dir;
      f_new = pot.value_and_gradient(u_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    Eigen::VectorXd s = u_new - u;
    Eigen::VectorXd yv = g_new - g;
    const double sy = s.dot(yv);
    if (sy > 1e-16) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(yv));
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > kMemory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    u = u_new;
    g = g_new;
    f = f_new;
  }
  return g.lpNorm<Eigen::Infinity>();
}

struct NewtonResult {
  double grad_norm;
  int negative_modes;
  Eigen::VectorXd escape;  // eigenvector of the most negative Hessian eigenvalue
};

// Newton polish with the rotational zero mode projected out.
NewtonResult newton_polish(const PlanarPotential& pot, Eigen::VectorXd& u, double tol) {
  Eigen::VectorXd g(u.size());
  NewtonResult res{0.0, 0, {}};
  for (int it = 0; it < 30; ++it) {
    pot.value_and_gradient(u, g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pot.hessian(u));
    const auto& lam = es.eigenvalues();
    const auto& vec = es.eigenvectors();
    const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
    res.negative_modes = 0;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
      if (lam[i] < -1e-9 * scale) ++res.negative_modes;
    if (res.negative_modes > 0) {
      res.escape = vec.col(0);
      res.grad_norm = g.lpNorm<Eigen::Infinity>();
      return res;
    }
    res.grad_norm = g.lpNorm<Eigen::Infinity>();
    if (res.grad_norm < tol * 1e-2) break;
    Eigen::VectorXd coeff = vec.transpose() * g;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
      coeff[i] = lam[i] > 1e-9 * scale ? coeff[i] / lam[i] : 0.0;
    u -= vec * coeff;
  }
  pot.value_and_gradient(u, g);
  res.grad_norm = g.lpNorm<Eigen::Infinity>();
  return res;
}

Eigen::VectorXd hexagonal_seed(std::size_t n, double beta) {
  // continuum planar-crystal radius and central density set the lattice spacing
  const double radius = std::cbrt(3.0 * kPi * static_cast<double>(n) / (4.0 * beta));
  const double density = 3.0 * static_cast<double>(n) / (2.0 * kPi * radius * radius);
  const double a = std::sqrt(2.0 / (std::sqrt(3.0) * density));
  std::vector<std::pair<double, Eigen::Vector2d>> pts;
  const int span = static_cast<int>(std::sqrt(static_cast<double>(n))) + 4;
  for (int i = -span; i <= span; ++i) {
    for (int k = -span; k <= span; ++k) {
      Eigen::Vector2d p(a * (i + 0.5 * k), a * (std::sqrt(3.0) / 2.0) * k);
      pts.emplace_back(p.squaredNorm(), p);
    }
  }
  std::stable_sort(pts.begin(), pts.end(),
                   [](const auto& l, const auto& r) { return l.first < r.first; });
  Eigen::VectorXd u(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    u[2 * j] = pts[j].second.x();
    u[2 * j + 1] = pts[j].second.y();
  }
  return u;
}

CrystalLayout gauge_fix(const Eigen::VectorXd& u, std::size_t n, double length_unit) {
  std::size_t outer = 0;
  double rmax = -1.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double r = std::hypot(u[2 * j], u[2 * j + 1]);
    if (r > rmax + 1e-12) {
      rmax = r;
      outer = j;
    }
  }
  const double rot = n > 1 ? -std::atan2(u[2 * outer + 1], u[2 * outer]) : 0.0;
  const double c = std::cos(rot), s = std::sin(rot);
  struct Ion {
    double x, y, r, p;
  };
  std::vector<Ion> ions(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = c * u[2 * j] - s * u[2 * j + 1];
    const double y = s * u[2 * j] + c * u[2 * j + 1];
    ions[j] = {x, y, std::hypot(x, y), std::atan2(y, x)};
  }
  if (n > 1) {
    ions[outer].y = 0.0;  // exact gauge
    ions[outer].x = ions[outer].r;
    ions[outer].p = 0.0;
  }
  std::stable_sort(ions.begin(), ions.end(), [](const Ion& a, const Ion& b) {
    if (std::abs(a.r - b.r) > 1e-9) return a.r < b.r;
    return a.p < b.p;
  });
  std::vector<double> xm(n), ym(n);
  for (std::size_t j = 0; j < n; ++j) {
    xm[j] = ions[j].x * length_unit;
    ym[j] = ions[j].y * length_unit;
  }
  return CrystalLayout::from_positions(xm, ym);
}

Eigen::VectorXd pack_dimensionless(const CrystalLayout& layout, double length_unit) {
  Eigen::VectorXd u(2 * layout.size());
  const double scale = layout.radius / length_unit;
  for (std::size_t j = 0; j < layout.size(); ++j) {
    u[2 * j] = layout.x[j] * scale;
    u[2 * j + 1] = layout.y[j] * scale;
  }
  return u;
}

}  // namespace

double crystal_energy(const CrystalLayout& layout, const TrapConfig& trap) {
  PlanarPotential pot{confinement_ratio(trap), layout.size()};
  Eigen::VectorXd g;
  return pot.value_and_gradient(pack_dimensionless(layout, coulomb_length(trap)), g);
}

Eigen::VectorXd crystal_gradient(const CrystalLayout& layout, const TrapConfig& trap) {
  PlanarPotential pot{confinement_ratio(trap), layout.size()};
  Eigen::VectorXd g;
  pot.value_and_gradient(pack_dimensionless(layout, coulomb_length(trap)), g);
  return g;
}

CrystalLayout equilibrate_crystal(const TrapConfig& trap, const std::optional<CrystalLayout>& seed,
                                  const EquilibriumOptions& options) {
  trap.validate();
  const std::size_t n = trap.ion_count;
  const double l0 = coulomb_length(trap);
  if (n == 1) return CrystalLayout::from_positions({0.0}, {0.0});

  const PlanarPotential pot{confinement_ratio(trap), n};
  Eigen::VectorXd u;
  if (seed) {
    if (seed->size() != n)
      throw Error(ErrorCategory::kValidation, "seed layout has " + std::to_string(seed->size()) +
                                                  " ions, trap expects " + std::to_string(n));
    // rescale the seed shape to the continuum radius
    const double target = std::cbrt(3.0 * kPi * static_cast<double>(n) / (4.0 * pot.beta));
    u.resize(2 * n);
    for (std::size_t j = 0; j < n; ++j) {
      u[2 * j] = seed->x[j] * target;
      u[2 * j + 1] = seed->y[j] * target;
    }
  } else {
    u = hexagonal_seed(n, pot.beta);
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  // a tiny symmetry-breaking kick keeps the minimizer off exact saddles of the lattice seed
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] += 1e-6 * jitter(rng);

  double residual = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt <= options.max_restarts; ++attempt) {
    // coarse quasi-Newton descent, then Newton to the tight tolerance
    lbfgs(pot, u, 1e-5, options.max_iterations);
    const NewtonResult nr = newton_polish(pot, u, options.gradient_tol);
    residual = nr.grad_norm;
    if (nr.negative_modes == 0 && residual < options.gradient_tol)
      return gauge_fix(u, n, l0);
    // saddle or stalled: push along the unstable direction plus noise and retry
    if (nr.negative_modes > 0) u += 0.05 * nr.escape;
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] += 0.01 * jitter(rng);
  }
  std::ostringstream os;
  os << "crystal equilibration did not converge after " << options.max_restarts + 1
     << " attempts; gradient max-norm " << residual;
  throw Error(ErrorCategory::kNumerical, os.str());
}

// ---------------------------------------------------------------------------
// Drumhead modes

ModeData drumhead_modes(const CrystalLayout& layout, const TrapConfig& trap, double dk_z) {
  const std::size_t n = layout.size();
  const double l0 = coulomb_length(trap);
  const double scale = layout.radius / l0;
  // axial stiffness in units of m omega_z^2
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) {
      const double d = std::hypot(layout.x[j] - layout.x[k], layout.y[j] - layout.y[k]) * scale;
      const double c = 1.0 / (d * d * d);
      a(j, k) = c;
      a(k, j) = c;
      a(j, j) -= c;
      a(k, k) -= c;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const auto& lam = es.eigenvalues();
  int unstable = 0;
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    if (!(lam[i] > 0.0)) ++unstable;
  if (unstable > 0)
    throw Error(ErrorCategory::kNumerical,
                "axial stiffness not positive definite: " + std::to_string(unstable) +
                    " unstable drumhead mode(s); the planar crystal is not stable");

  ModeData modes;
  modes.frequencies.resize(n);
  modes.lamb_dicke.resize(n);
  modes.vectors.resize(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Index src = static_cast<Eigen::Index>(n - 1 - i);
    modes.frequencies[i] = trap.axial_freq * std::sqrt(lam[src]);
    Eigen::VectorXd v = es.eigenvectors().col(src);
    // sign gauge: largest-magnitude component positive (c.m. mode becomes all-positive)
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0.0) v = -v;
    modes.vectors.col(i) = v;
    modes.lamb_dicke[i] = dk_z * std::sqrt(constants::hbar / (2.0 * trap.ion_mass * modes.frequencies[i]));
  }
  return modes;
}

// ---------------------------------------------------------------------------
// Files

std::string format_layout(const CrystalLayout& layout) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << layout.size() << ' ' << layout.radius << '\n';
  for (std::size_t j = 0; j < layout.size(); ++j)
    os << j << ' ' << layout.x[j] << ' ' << layout.y[j] << '\n';
  return os.str();
}

CrystalLayout parse_layout(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCategory::kParse, "layout line " + std::to_string(lineno) + ": " + why);
  };
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      const auto pos = line.find_first_not_of(" \t\r");
      if (pos == std::string::npos || line[pos] == '#') continue;
      return true;
    }
    return false;
  };
  if (!next_line()) {
    lineno = std::max(lineno, 1);
    fail("empty layout file (expected header 'N R_meters')");
  }
  long long n = 0;
  double radius = 0.0;
  {
    std::istringstream hs(line);
    std::string extra;
    if (!(hs >> n >> radius) || (hs >> extra)) fail("malformed header, expected 'N R_meters'");
    if (n < 1) fail("ion count must be positive");
    if (!(radius >= 0.0) || !std::isfinite(radius)) fail("radius must be finite and non-negative");
  }
  std::vector<double> xn(n), yn(n);
  std::vector<bool> seen(n, false);
  for (long long i = 0; i < n; ++i) {
    if (!next_line()) {
      ++lineno;
      fail("expected " + std::to_string(n) + " ion rows, found " + std::to_string(i));
    }
    std::istringstream rs(line);
    long long idx = 0;
    double xv = 0.0, yv = 0.0;
    std::string extra;
    if (!(rs >> idx >> xv >> yv) || (rs >> extra)) fail("malformed row, expected 'index x y'");
    if (idx < 0 || idx >= n) fail("ion index out of range");
    if (seen[idx]) fail("duplicate ion index " + std::to_string(idx));
    seen[idx] = true;
    xn[idx] = xv;
    yn[idx] = yv;
  }
  if (next_line()) fail("unexpected trailing content");
  auto layout = CrystalLayout::from_normalized(radius, std::move(xn), std::move(yn));
  layout.validate();
  return layout;
}

void save_layout(const CrystalLayout& layout, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::kIo, "cannot open " + path.string() + " for writing");
  out << format_layout(layout);
}

CrystalLayout load_layout(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::kIo, "cannot open layout file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_layout(buf.str());
}

void save_modes(const ModeData& modes, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::kIo, "cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  const std::size_t n = modes.size();
  out << n << '\n';
  for (double w : modes.frequencies) out << w << '\n';
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) out << (k ? " " : "") << modes.vectors(j, k);
    out << '\n';
  }
}

ModeData load_modes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::kIo, "cannot open mode file " + path.string());
  long long n = 0;
  if (!(in >> n) || n < 1) throw Error(ErrorCategory::kParse, "mode file: bad header");
  ModeData m;
  m.frequencies.resize(n);
  m.vectors.resize(n, n);
  for (auto& w : m.frequencies)
    if (!(in >> w)) throw Error(ErrorCategory::kParse, "mode file: truncated frequency column");
  for (long long j = 0; j < n; ++j)
    for (long long k = 0; k < n; ++k)
      if (!(in >> m.vectors(j, k)))
        throw Error(ErrorCategory::kParse, "mode file: truncated matrix row " + std::to_string(j));
  return m;
}

}  // namespace pwave
