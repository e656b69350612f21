#include "pwave/analysis.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

namespace pwave {

double psi_tilde(const SpinConfiguration& s, const CrystalLayout& layout) {
  return 2.0 / static_cast<double>(s.size()) * std::sqrt(std::abs(pair_correlator(s, layout)));
}

double psi_incoherent(const SpinConfiguration& s, const CrystalLayout& layout) {
  double acc = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j)
    acc += layout.r_norm[j] * layout.r_norm[j] * std::norm(s.s_plus(j));
  return 2.0 / static_cast<double>(s.size()) * std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// Delaunay (Bowyer-Watson)

namespace {

using P2 = std::array<long double, 2>;

long double orient(const P2& a, const P2& b, const P2& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

// > 0 when d lies strictly inside the circumcircle of counterclockwise (a, b, c)
long double incircle(const P2& a, const P2& b, const P2& c, const P2& d) {
  const long double adx = a[0] - d[0], ady = a[1] - d[1];
  const long double bdx = b[0] - d[0], bdy = b[1] - d[1];
  const long double cdx = c[0] - d[0], cdy = c[1] - d[1];
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

}  // namespace

Triangulation delaunay(const std::vector<double>& xin, const std::vector<double>& yin) {
  const std::size_t n = xin.size();
  if (n != yin.size()) throw Error(ErrorCategory::kValidation, "coordinate arrays differ in length");
  if (n < 3) throw Error(ErrorCategory::kValidation, "triangulation needs at least 3 points");

  // deterministic radial jitter breaks cocircular ties
  std::vector<P2> p(n + 3);
  double cx = 0.0, cy = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cx += xin[j];
    cy += yin[j];
  }
  cx /= static_cast<double>(n);
  cy /= static_cast<double>(n);
  double extent = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const long double f = 1.0L + 1e-9L * static_cast<long double>(j);
    p[j] = {(xin[j] - cx) * f, (yin[j] - cy) * f};
    extent = std::max({extent, std::abs(xin[j] - cx), std::abs(yin[j] - cy)});
  }
  if (!(extent > 0.0)) throw Error(ErrorCategory::kValidation, "all points coincide");
  {
    bool collinear = true;
    for (std::size_t j = 2; j < n && collinear; ++j)
      for (std::size_t i = 1; i < j && collinear; ++i)
        if (std::abs(orient(p[0], p[i], p[j])) > 1e-12L * extent * extent) collinear = false;
    if (collinear) throw Error(ErrorCategory::kValidation, "degenerate input: all points collinear");
  }
  const long double big = 1e4L * extent;
  p[n] = {-big, -big};
  p[n + 1] = {big, -big};
  p[n + 2] = {0.0L, big};

  struct Tri {
    int v[3];
    bool alive;
  };
  std::vector<Tri> tris{{{static_cast<int>(n), static_cast<int>(n + 1), static_cast<int>(n + 2)}, true}};
  std::vector<int> bad;
  std::vector<std::array<int, 2>> edges;
  for (std::size_t j = 0; j < n; ++j) {
    bad.clear();
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!tris[t].alive) continue;
      const auto& v = tris[t].v;
      if (incircle(p[v[0]], p[v[1]], p[v[2]], p[j]) > 0.0L) bad.push_back(static_cast<int>(t));
    }
    // cavity boundary: edges of bad triangles not shared with another bad triangle
    std::map<std::pair<int, int>, int> count;
    for (int t : bad)
      for (int e = 0; e < 3; ++e) {
        const int a = tris[t].v[e], b = tris[t].v[(e + 1) % 3];
        ++count[{std::min(a, b), std::max(a, b)}];
      }
    edges.clear();
    for (int t : bad) {
      for (int e = 0; e < 3; ++e) {
        const int a = tris[t].v[e], b = tris[t].v[(e + 1) % 3];
        if (count[{std::min(a, b), std::max(a, b)}] == 1) edges.push_back({a, b});
      }
      tris[t].alive = false;
    }
    for (const auto& e : edges) tris.push_back({{e[0], e[1], static_cast<int>(j)}, true});
    if (tris.size() > 8 * n + 64) {
      tris.erase(std::remove_if(tris.begin(), tris.end(), [](const Tri& t) { return !t.alive; }),
                 tris.end());
    }
  }

  Triangulation out;
  for (const auto& t : tris) {
    if (!t.alive) continue;
    if (t.v[0] >= static_cast<int>(n) || t.v[1] >= static_cast<int>(n) || t.v[2] >= static_cast<int>(n))
      continue;
    std::array<int, 3> v{t.v[0], t.v[1], t.v[2]};
    if (orient(p[v[0]], p[v[1]], p[v[2]]) < 0.0L) std::swap(v[1], v[2]);
    out.triangles.push_back(v);
  }
  std::sort(out.triangles.begin(), out.triangles.end());
  return out;
}

Triangulation delaunay(const CrystalLayout& layout) { return delaunay(layout.x, layout.y); }

std::vector<int> convex_hull(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<int> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });
  auto cross = [&](int o, int a, int b) {
    return (x[a] - x[o]) * (y[b] - y[o]) - (y[a] - y[o]) * (x[b] - x[o]);
  };
  std::vector<int> h(2 * idx.size());
  std::size_t k = 0;
  for (int i : idx) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], i) <= 0.0) --k;
    h[k++] = i;
  }
  for (std::size_t i = idx.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], idx[i]) <= 0.0) --k;
    h[k++] = idx[i];
  }
  h.resize(k > 1 ? k - 1 : k);
  return h;
}

std::string format_triangulation_csv(const Triangulation& t) {
  std::ostringstream os;
  os << "a,b,c\n";
  for (const auto& v : t.triangles) os << v[0] << ',' << v[1] << ',' << v[2] << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Winding

SolidAngle solid_angle(const Vec3& a, const Vec3& b, const Vec3& c, double eps) {
  const double num = a.dot(b.cross(c));
  const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  SolidAngle s;
  // on the branch cut the sign of a 2 pi solid angle is undetermined
  if (den <= eps && std::abs(num) <= eps) {
    s.ill_defined = true;
    return s;
  }
  s.omega = 2.0 * std::atan2(num, den);
  return s;
}

Winding winding_number(const Triangulation& tri, const std::vector<Vec3>& field) {
  std::vector<Vec3> u(field.size());
  std::vector<bool> ok(field.size());
  for (std::size_t j = 0; j < field.size(); ++j) {
    const double n = field[j].norm();
    ok[j] = n > 0.0 && std::isfinite(n);
    u[j] = ok[j] ? Vec3(field[j] / n) : Vec3::Zero();
  }
  Winding w;
  double total = 0.0;
  for (const auto& t : tri.triangles) {
    if (!ok[t[0]] || !ok[t[1]] || !ok[t[2]]) {
      ++w.ill_defined;
      continue;
    }
    const auto s = solid_angle(u[t[0]], u[t[1]], u[t[2]]);
    if (s.ill_defined) {
      ++w.ill_defined;
      continue;
    }
    total += s.omega;
  }
  w.value = total / (4.0 * kPi);
  return w;
}

Winding winding_number(const CrystalLayout& layout, const std::vector<Vec3>& field) {
  return winding_number(delaunay(layout), field);
}

// ---------------------------------------------------------------------------
// Field, mu, CPDF

std::vector<Vec3> effective_field(const SpinConfiguration& s, const CrystalLayout& layout,
                                  double K, double J, double mu_infty) {
  const cplx psi = order_parameter(s, layout);
  std::vector<Vec3> b(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double r = layout.r_norm[j];
    const double c = std::cos(layout.phi[j]), sn = std::sin(layout.phi[j]);
    b[j] = Vec3(J * r * (c * psi.real() + sn * psi.imag()), -J * r * (c * psi.imag() - sn * psi.real()),
                -K * r * r + 2.0 * mu_infty);
  }
  return b;
}

namespace {

struct Window {
  std::size_t begin = 0, end = 0;
};

Window tail_window(const TimeSeries& ts, double fraction) {
  if (ts.size() < 3) throw Error(ErrorCategory::kValidation, "time series too short");
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw Error(ErrorCategory::kValidation, "window fraction must lie in (0, 1]");
  const double t0 = ts.t.front(), t1 = ts.t.back();
  const double start = t1 - fraction * (t1 - t0);
  Window w;
  w.end = ts.size();
  w.begin = static_cast<std::size_t>(
      std::lower_bound(ts.t.begin(), ts.t.end(), start - 1e-12) - ts.t.begin());
  if (w.end - w.begin < 3) throw Error(ErrorCategory::kValidation, "window holds fewer than 3 samples");
  return w;
}

}  // namespace

std::optional<MuInfty> extract_mu_infty(const TimeSeries& ts, double window, double floor) {
  const Window w = tail_window(ts, window);
  double prev = 0.0, offset = 0.0;
  double st = 0.0, sp = 0.0, stt = 0.0, stp = 0.0, amp = 0.0;
  const double n = static_cast<double>(w.end - w.begin);
  for (std::size_t i = w.begin; i < w.end; ++i) {
    const double a = std::abs(ts.psi[i]);
    if (a < floor) return std::nullopt;
    amp += a;
    double ph = std::arg(ts.psi[i]);
    if (i > w.begin) {
      while (ph + offset - prev > kPi) offset -= kTwoPi;
      while (ph + offset - prev < -kPi) offset += kTwoPi;
    }
    ph += offset;
    prev = ph;
    st += ts.t[i];
    sp += ph;
    stt += ts.t[i] * ts.t[i];
    stp += ts.t[i] * ph;
  }
  const double slope = (n * stp - st * sp) / (n * stt - st * st);
  return MuInfty{-0.5 * slope, amp / n};
}

std::optional<MuInfty> extract_mu_infty_fourier(const TimeSeries& ts, double window, double floor) {
  const Window w = tail_window(ts, window);
  const std::size_t m = w.end - w.begin;
  double amp = 0.0;
  for (std::size_t i = w.begin; i < w.end; ++i) {
    if (std::abs(ts.psi[i]) < floor) return std::nullopt;
    amp += std::abs(ts.psi[i]);
  }
  const double dt = (ts.t[w.end - 1] - ts.t[w.begin]) / static_cast<double>(m - 1);
  const double span = dt * static_cast<double>(m);
  const int pad = 16;
  const long long bins = static_cast<long long>(m) * pad;
  double best = -1.0, best_omega = 0.0;
  for (long long k = -bins / 2; k < bins / 2; ++k) {
    const double omega = kTwoPi * static_cast<double>(k) / (span * pad);
    cplx acc = 0.0;
    for (std::size_t i = w.begin; i < w.end; ++i) acc += ts.psi[i] * std::polar(1.0, omega * ts.t[i]);
    if (std::norm(acc) > best) {
      best = std::norm(acc);
      best_omega = omega;
    }
  }
  return MuInfty{0.5 * best_omega, amp / static_cast<double>(m)};
}

Cpdf cpdf(const SpinConfiguration& s, const CrystalLayout& layout, double K, double J,
          double mu_infty, double eps) {
  const auto b = effective_field(s, layout, K, J, mu_infty);
  Cpdf c;
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double ns = s.spins[j].norm(), nb = b[j].norm();
    if (ns < eps || !(nb > 0.0)) {
      ++c.excluded;
      continue;
    }
    c.r.push_back(layout.r_norm[j]);
    c.gamma.push_back(std::clamp(s.spins[j].dot(b[j]) / (ns * nb), -1.0, 1.0));
    c.site.push_back(static_cast<int>(j));
  }
  if (c.gamma.empty())
    throw Error(ErrorCategory::kNumerical, "CPDF: every site fell below the spin-length floor");
  return c;
}

int cpdf_zero_crossings(const Cpdf& c, double bin_width) {
  const int nbins = static_cast<int>(std::ceil(1.0 / bin_width - 1e-12));
  std::vector<double> sum(nbins, 0.0);
  std::vector<int> cnt(nbins, 0);
  for (std::size_t i = 0; i < c.r.size(); ++i) {
    const int b = std::min(nbins - 1, static_cast<int>(c.r[i] / bin_width));
    sum[b] += c.gamma[i];
    ++cnt[b];
  }
  int crossings = 0, last = 0;
  for (int b = 0; b < nbins; ++b) {
    if (!cnt[b] || sum[b] == 0.0) continue;
    const int sg = sum[b] > 0.0 ? 1 : -1;
    if (last != 0 && sg != last) ++crossings;
    last = sg;
  }
  return crossings;
}

std::string format_cpdf_csv(const Cpdf& c) {
  std::ostringstream os;
  os << "r_over_R,gamma\n" << std::setprecision(17);
  std::vector<std::size_t> order(c.r.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return c.r[a] < c.r[b]; });
  for (auto i : order) os << c.r[i] << ',' << c.gamma[i] << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Phases

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::kI: return "I";
    case Phase::kII: return "II";
    case Phase::kIII: return "III";
  }
  return "?";
}

PhaseStats classify_phase_stats(const TimeSeries& ts, const PhaseOptions& opt) {
  if (ts.size() < 3 || ts.t.back() - ts.t.front() < opt.min_duration)
    throw Error(ErrorCategory::kValidation,
                "series too short to classify: need a duration of at least " +
                    std::to_string(opt.min_duration));
  const Window w = tail_window(ts, opt.window);
  PhaseStats st;
  for (const auto& p : ts.psi) st.max_abs = std::max(st.max_abs, std::abs(p));
  double s = 0.0, q = 0.0;
  const double n = static_cast<double>(w.end - w.begin);
  for (std::size_t i = w.begin; i < w.end; ++i) {
    const double a = std::abs(ts.psi[i]);
    s += a;
    q += a * a;
  }
  st.mean = s / n;
  st.sigma = std::sqrt(std::max(0.0, q / n - st.mean * st.mean));
  st.threshold = std::max(opt.decay_fraction * st.max_abs, opt.floor_factor * opt.psi_incoherent);
  if (st.mean < st.threshold)
    st.phase = Phase::kI;
  else if (st.sigma / st.mean > opt.oscillation)
    st.phase = Phase::kIII;
  else
    st.phase = Phase::kII;
  return st;
}

Phase classify_phase(const TimeSeries& ts, const PhaseOptions& opt) {
  return classify_phase_stats(ts, opt).phase;
}

// ---------------------------------------------------------------------------
// Readout

double emulate_readout(const SpinConfiguration& s, const CrystalLayout& layout, Quadrature q,
                       double omega0_t_max, int samples) {
  if (samples < 4) throw Error(ErrorCategory::kValidation, "readout needs at least 4 samples");
  if (!(omega0_t_max > 0.0)) throw Error(ErrorCategory::kValidation, "rotation time must be > 0");
  // Omega_0 = 1; the drive is a rotation by r~_j t about the local axis
  Eigen::MatrixXd a(samples, 3);
  Eigen::VectorXd b(samples);
  for (int k = 0; k < samples; ++k) {
    const double t = omega0_t_max * k / (samples - 1);
    double sz = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      const auto ax = local_axes(layout.phi[j]);
      const Vec3 axis = q == Quadrature::kIm ? ax.second : Vec3(-ax.first);
      const double ang = layout.r_norm[j] * t;
      const Vec3& v = s.spins[j];
      const Vec3 rv = v * std::cos(ang) + axis.cross(v) * std::sin(ang) +
                      axis * axis.dot(v) * (1.0 - std::cos(ang));
      sz += rv.z();
    }
    const double x = t / omega0_t_max;
    a(k, 0) = 1.0;
    a(k, 1) = x;
    a(k, 2) = x * x;
    b[k] = sz;
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  const double slope = c[1] / omega0_t_max;
  return -2.0 * slope / static_cast<double>(s.size());
}

// ---------------------------------------------------------------------------

std::string topology_report_json(const TopologyReport& r) {
  nlohmann::json j;
  j["Q"] = r.Q ? nlohmann::json(*r.Q) : nlohmann::json(nullptr);
  j["W"] = r.W ? nlohmann::json(*r.W) : nlohmann::json(nullptr);
  j["mu_infty"] = r.mu ? nlohmann::json(r.mu->mu) : nlohmann::json(nullptr);
  j["psi_infty"] = r.mu ? nlohmann::json(r.mu->psi_infty) : nlohmann::json(nullptr);
  j["phase"] = r.phase ? nlohmann::json(phase_name(*r.phase)) : nlohmann::json(nullptr);
  j["zero_crossings"] = r.zero_crossings;
  j["ill_defined_triangles"] = r.ill_defined_triangles;
  j["cpdf"] = {{"r_over_R", r.cpdf.r}, {"gamma", r.cpdf.gamma}, {"excluded", r.cpdf.excluded}};
  return j.dump(2);
}

}  // namespace pwave
