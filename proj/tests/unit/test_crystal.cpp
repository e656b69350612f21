#include "pwave/crystal.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace pwave;

namespace {

// Case-A equilibrium at N = 200 is shared by several tests; solving it once keeps the suite fast.
const CrystalLayout& case_a_200() {
  static const CrystalLayout layout = equilibrate_crystal(TrapConfig::case_a(200));
  return layout;
}

}  // namespace

TEST_CASE("ring crystal populations and radii") {
  CHECK(hexagonal_count(1) == 1);
  CHECK(hexagonal_count(2) == 7);
  CHECK(hexagonal_count(3) == 19);
  CHECK(hexagonal_count(4) == 37);
  CHECK(hexagonal_count(5) == 61);

  const auto one = make_ring_crystal(1);
  REQUIRE(one.size() == 1);
  CHECK(one.r_norm[0] == 0.0);

  const auto spec = RingCrystalSpec::make(4);
  CHECK(spec.populations == std::vector<int>{1, 6, 12, 18});
  CHECK(spec.total() == 37);
  const auto l4 = make_ring_crystal(4);
  REQUIRE(l4.size() == 37);
  const double radii[] = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  for (int m = 0; m < 4; ++m) {
    const int off = spec.offset(m);
    const int n = spec.populations[m];
    for (int i = 0; i < n; ++i) {
      CHECK(l4.r_norm[off + i] == doctest::Approx(radii[m]).epsilon(1e-14));
      if (n > 1) {
        // uniform spacing
        const double a = std::atan2(l4.y[off + i], l4.x[off + i]);
        const double expect = kTwoPi * i / n;
        CHECK(std::remainder(a - expect, kTwoPi) == doctest::Approx(0.0).epsilon(1e-12));
      }
    }
  }
  CHECK(make_ring_crystal(5).size() == 61);
}

TEST_CASE("layout invariants") {
  const auto l = make_ring_crystal(3, 5e-5);
  CHECK(l.radius == 5e-5);
  for (std::size_t j = 0; j < l.size(); ++j) {
    CHECK(l.r_norm[j] >= 0.0);
    CHECK(l.r_norm[j] <= 1.0);
    CHECK(l.phi[j] > -kPi);
    CHECK(l.phi[j] <= kPi);
    CHECK(l.x[j] == doctest::Approx(l.r_norm[j] * std::cos(l.phi[j])).epsilon(1e-14));
  }
  CrystalLayout bad = CrystalLayout::from_normalized(1e-4, {0.0, 1.5}, {0.0, 0.0});
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("layout file round trip is bit exact") {
  const auto dir = testutil::temp_dir("layout");
  const auto l = make_ring_crystal(3, 1.2345678901234567e-4);
  save_layout(l, dir / "l.txt");
  const auto back = load_layout(dir / "l.txt");
  CHECK(back.radius == l.radius);
  CHECK(back.x == l.x);
  CHECK(back.y == l.y);
  CHECK(back.r_norm == l.r_norm);
  CHECK(back.phi == l.phi);

  const auto eq = case_a_200();
  CHECK(parse_layout(format_layout(eq)).x == eq.x);
}

TEST_CASE("layout parse errors") {
  auto category_of = [](const std::string& text) {
    try {
      parse_layout(text);
    } catch (const Error& e) {
      return std::pair{e.category(), std::string(e.what())};
    }
    return std::pair{ErrorCategory::kUsage, std::string("no error")};
  };
  CHECK(category_of("").first == ErrorCategory::kParse);
  const auto [cat, msg] = category_of("2 1e-4\n0 0 0\n1 0.5 abc\n");
  CHECK(cat == ErrorCategory::kParse);
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(category_of("1 1e-4\n0 1.5 0\n").first == ErrorCategory::kValidation);
  CHECK_THROWS_AS(load_layout("/nonexistent/dir/layout.txt"), Error);
}

TEST_CASE("trap validation lists unstable confinement") {
  TrapConfig t = TrapConfig::case_a();
  t.axial_freq = to_angular(50e6);
  try {
    t.validate();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::kValidation);
    CHECK(std::string(e.what()).find("radial confinement") != std::string::npos);
  }
}

TEST_CASE("small equilibria") {
  auto trap = TrapConfig::case_a(1);
  const auto one = equilibrate_crystal(trap);
  REQUIRE(one.size() == 1);
  CHECK(one.r_norm[0] == 0.0);

  trap.ion_count = 2;
  const auto two = equilibrate_crystal(trap);
  REQUIRE(two.size() == 2);
  CHECK(two.r_norm[0] == doctest::Approx(1.0));
  CHECK(two.r_norm[1] == doctest::Approx(1.0));
  CHECK(two.x[0] + two.x[1] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(two.y[0] + two.y[1] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("case A equilibrium at N = 200") {
  const auto trap = TrapConfig::case_a(200);
  const auto& l = case_a_200();
  REQUIRE(l.size() == 200);
  CHECK(l.radius > 80e-6);
  CHECK(l.radius < 120e-6);
  CHECK(crystal_gradient(l, trap).cwiseAbs().maxCoeff() < 1e-9);

  // analytic gradient against central differences
  const double h = 1e-6;
  const double scale = l.radius / coulomb_length(trap);
  const auto g = crystal_gradient(l, trap);
  for (std::size_t j : {0u, 57u, 199u}) {
    auto xp = l.x, xm = l.x;
    xp[j] += h;
    xm[j] -= h;
    const double fd = (crystal_energy(CrystalLayout::from_normalized(l.radius, xp, l.y), trap) -
                       crystal_energy(CrystalLayout::from_normalized(l.radius, xm, l.y), trap)) /
                      (2 * h);
    CHECK(fd / scale == doctest::Approx(g[2 * j]).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("finite-difference gradient away from equilibrium") {
  const auto trap = TrapConfig::case_a(7);
  const auto l = make_ring_crystal(2, 3e-5);
  const auto g = crystal_gradient(l, trap);
  const double scale = l.radius / coulomb_length(trap);
  const double h = 1e-6;
  for (std::size_t j = 0; j < 7; ++j) {
    auto yp = l.y, ym = l.y;
    yp[j] += h;
    ym[j] -= h;
    const double fd = (crystal_energy(CrystalLayout::from_normalized(l.radius, l.x, yp), trap) -
                       crystal_energy(CrystalLayout::from_normalized(l.radius, l.x, ym), trap)) /
                      (2 * h);
    CHECK(fd / scale == doctest::Approx(g[2 * j + 1]).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("drumhead modes") {
  const auto trap = TrapConfig::case_a(200);
  const auto& l = case_a_200();
  const double dkz = 1.5e7;
  const auto m = drumhead_modes(l, trap, dkz);
  REQUIRE(m.size() == 200);
  const Eigen::MatrixXd gram = m.vectors.transpose() * m.vectors;
  CHECK((gram - Eigen::MatrixXd::Identity(200, 200)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(to_hz(m.frequencies[0]) == doctest::Approx(1.59e6).epsilon(1e-9));
  const double u = 1.0 / std::sqrt(200.0);
  CHECK((m.vectors.col(0).cwiseAbs().array() - u).abs().maxCoeff() < 1e-8);
  for (std::size_t n = 1; n < m.size(); ++n) CHECK(m.frequencies[n] <= m.frequencies[n - 1]);
  for (std::size_t n = 0; n < m.size(); n += 37)
    CHECK(m.lamb_dicke[n] ==
          doctest::Approx(dkz * std::sqrt(constants::hbar / (2 * trap.ion_mass * m.frequencies[n]))));
}

TEST_CASE("seven-ion ring modes") {
  // the ideal ring is not an equilibrium, so only the c.m. structure is checked
  auto trap = TrapConfig::case_a(7);
  const auto eq = equilibrate_crystal(trap, make_ring_crystal(2));
  const auto m = drumhead_modes(eq, trap, 1.0);
  const double u = 1.0 / std::sqrt(7.0);
  CHECK((m.vectors.col(0).cwiseAbs().array() - u).abs().maxCoeff() < 1e-10);
  for (Eigen::Index n = 1; n < 7; ++n)
    CHECK(std::abs(m.vectors.col(0).dot(m.vectors.col(n))) < 1e-10);

  const auto one = drumhead_modes(CrystalLayout::from_positions({0.0}, {0.0}),
                                  TrapConfig::case_a(1), 1.0);
  REQUIRE(one.size() == 1);
  CHECK(one.frequencies[0] == doctest::Approx(trap.axial_freq));
  CHECK(std::abs(one.vectors(0, 0)) == doctest::Approx(1.0));
}

TEST_CASE("mode file round trip") {
  const auto dir = testutil::temp_dir("modes");
  auto trap = TrapConfig::case_a(19);
  const auto l = equilibrate_crystal(trap);
  const auto m = drumhead_modes(l, trap, 1.0);
  save_modes(m, dir / "m.txt");
  const auto back = load_modes(dir / "m.txt");
  CHECK(back.frequencies == m.frequencies);
  CHECK((back.vectors - m.vectors).cwiseAbs().maxCoeff() == 0.0);
}
