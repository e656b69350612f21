#include "pwave/states.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace pwave {

double SpinConfiguration::total_sz() const {
  double s = 0.0;
  for (const auto& v : spins) s += v.z();
  return s;
}

const char* init_kind_name(InitKind k) {
  switch (k) {
    case InitKind::kBcs: return "bcs";
    case InitKind::kBec: return "bec";
    case InitKind::kDomainWall: return "domain-wall";
    case InitKind::kRawRotation: return "rotation";
  }
  return "?";
}

InitKind parse_init_kind(const std::string& s) {
  if (s == "bcs") return InitKind::kBcs;
  if (s == "bec") return InitKind::kBec;
  if (s == "domain_wall" || s == "domain-wall" || s == "dw") return InitKind::kDomainWall;
  if (s == "rotation" || s == "raw") return InitKind::kRawRotation;
  throw Error(ErrorCategory::kConfig,
              "unknown init kind '" + s + "' (expected bcs, bec, domain-wall, rotation)");
}

void InitProtocol::validate() const {
  std::string msg;
  if (!(pulse_area >= 0.0) || !std::isfinite(pulse_area)) msg += "; pulse area must be >= 0";
  if (!(waist > 0.0)) msg += "; waist must be > 0";
  if (kind == InitKind::kDomainWall && !(domain_radius > 0.0 && domain_radius < 1.0))
    msg += "; domain radius must lie in (0, 1)";
  if (!msg.empty()) throw Error(ErrorCategory::kValidation, "invalid init protocol" + msg);
}

double InitProtocol::angle_at(double r) const {
  if (std::isinf(waist)) return pulse_area * r;
  return pulse_area * r * std::exp(-r * r / (waist * waist));
}

double pulse_area_for_peak(double peak, double waist) {
  // max of r exp(-r^2/w^2) is w / sqrt(2e) at r = w / sqrt(2)
  return peak * std::sqrt(2.0 * std::exp(1.0)) / waist;
}

InitProtocol InitProtocol::bcs() {
  InitProtocol p;
  p.kind = InitKind::kBcs;
  p.pulse_area = kPi;
  p.start = Polarity::kUp;
  return p;
}

InitProtocol InitProtocol::bec() {
  InitProtocol p;
  p.kind = InitKind::kBec;
  p.waist = 0.3;
  p.pulse_area = pulse_area_for_peak(kPi, p.waist);
  p.start = Polarity::kDown;
  return p;
}

InitProtocol InitProtocol::domain_wall() {
  InitProtocol p;
  p.kind = InitKind::kDomainWall;
  p.waist = 0.5;
  p.pulse_area = pulse_area_for_peak(0.1 * kPi, p.waist);
  p.domain_radius = 0.5;
  return p;
}

std::pair<Vec3, Vec3> local_axes(double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  return {Vec3(s, -c, 0.0), Vec3(c, s, 0.0)};
}

SpinConfiguration polarized_state(std::size_t n, Polarity p) {
  SpinConfiguration s;
  s.spins.assign(n, Vec3(0.0, 0.0, p == Polarity::kUp ? 0.5 : -0.5));
  return s;
}

SpinConfiguration apply_init_rotation(const SpinConfiguration& state, const CrystalLayout& layout,
                                      const InitProtocol& proto) {
  proto.validate();
  if (state.size() != layout.size())
    throw Error(ErrorCategory::kValidation, "state and layout sizes differ");
  SpinConfiguration out = state;
  for (std::size_t j = 0; j < state.size(); ++j) {
    const double a = proto.angle_at(layout.r_norm[j]);
    if (a == 0.0) continue;
    const Vec3 k = local_axes(layout.phi[j]).second;
    const Vec3& v = state.spins[j];
    // Rodrigues
    out.spins[j] = v * std::cos(a) + k.cross(v) * std::sin(a) + k * k.dot(v) * (1.0 - std::cos(a));
  }
  return out;
}

SpinConfiguration make_initial_state(const CrystalLayout& layout, const InitProtocol& proto) {
  proto.validate();
  SpinConfiguration s = polarized_state(layout.size(), proto.start);
  if (proto.kind == InitKind::kDomainWall) {
    for (std::size_t j = 0; j < layout.size(); ++j)
      s.spins[j].z() = layout.r_norm[j] < proto.domain_radius ? 0.5 : -0.5;
  }
  return apply_init_rotation(s, layout, proto);
}

SpinConfiguration make_bcs_state(const CrystalLayout& layout) {
  return make_initial_state(layout, InitProtocol::bcs());
}

SpinConfiguration make_bec_state(const CrystalLayout& layout) {
  return make_initial_state(layout, InitProtocol::bec());
}

SpinConfiguration make_domain_wall_state(const CrystalLayout& layout) {
  return make_initial_state(layout, InitProtocol::domain_wall());
}

void save_texture(const SpinConfiguration& s, const CrystalLayout& layout,
                  const std::filesystem::path& path) {
  if (s.size() != layout.size())
    throw Error(ErrorCategory::kValidation, "state and layout sizes differ");
  std::ofstream out(path);
  if (!out) throw Error(ErrorCategory::kIo, "cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  for (std::size_t j = 0; j < s.size(); ++j)
    out << j << ' ' << layout.x[j] << ' ' << layout.y[j] << ' ' << s.spins[j].x() << ' '
        << s.spins[j].y() << ' ' << s.spins[j].z() << '\n';
}

SpinConfiguration load_texture(const std::filesystem::path& path, const CrystalLayout& layout) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCategory::kIo, "cannot open texture file " + path.string());
  SpinConfiguration s;
  s.spins.assign(layout.size(), Vec3::Zero());
  std::vector<bool> seen(layout.size(), false);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream rs(line);
    long long idx;
    double x, y, sx, sy, sz;
    if (!(rs >> idx >> x >> y >> sx >> sy >> sz))
      throw Error(ErrorCategory::kParse, "texture line " + std::to_string(lineno) + ": malformed row");
    if (idx < 0 || idx >= static_cast<long long>(layout.size()) || seen[idx])
      throw Error(ErrorCategory::kParse,
                  "texture line " + std::to_string(lineno) + ": bad or duplicate index");
    if (std::abs(x - layout.x[idx]) > 1e-9 || std::abs(y - layout.y[idx]) > 1e-9)
      throw Error(ErrorCategory::kValidation,
                  "texture line " + std::to_string(lineno) + ": position does not match layout");
    seen[idx] = true;
    s.spins[idx] = Vec3(sx, sy, sz);
  }
  for (std::size_t j = 0; j < seen.size(); ++j)
    if (!seen[j])
      throw Error(ErrorCategory::kParse, "texture file lacks ion " + std::to_string(j));
  return s;
}

}  // namespace pwave
