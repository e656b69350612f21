#include "pwave/exact.hpp"
#include "test_util.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace pwave;

namespace {

ExactState dense_evolve(const SparseMatrix& h, const ExactState& v, double t) {
  const Eigen::MatrixXd dense = Eigen::MatrixXd(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  const Eigen::VectorXcd phases =
      es.eigenvalues().unaryExpr([t](double e) { return std::polar(1.0, -e * t); });
  const Eigen::MatrixXcd u = es.eigenvectors().cast<cplx>();
  return u * phases.asDiagonal() * (u.adjoint() * v);
}

}  // namespace

TEST_CASE("ring basis bookkeeping") {
  const auto b = RingBasis::make(RingCrystalSpec::make(3));
  CHECK(b.dims == std::vector<long long>{2, 7, 13});
  CHECK(b.dimension == 2 * 7 * 13);
  for (long long i = 0; i < b.dimension; i += 17) CHECK(b.index(b.occupations(i)) == i);
  CHECK_THROWS_AS(RingBasis::make(RingCrystalSpec::make(6), 1000), Error);
  try {
    RingBasis::make(RingCrystalSpec::make(9));
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::kCapability);
  }
}

TEST_CASE("collective operators obey the spin algebra") {
  const auto b = RingBasis::make(RingCrystalSpec::make(3));
  for (int m = 0; m < 3; ++m) {
    const SparseMatrix jp = ring_jplus(b, m), jm = ring_jminus(b, m), jz = ring_jz(b, m);
    const SparseMatrix comm = jp * jm - jm * jp;
    CHECK((Eigen::MatrixXd(comm) - 2.0 * Eigen::MatrixXd(jz)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((Eigen::MatrixXd(jp).transpose() - Eigen::MatrixXd(jm)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("seven-ion spectrum against brute force") {
  const auto o = testutil::oracle("brute_force_rings.json");
  const auto b = RingBasis::make(RingCrystalSpec::make(2));
  REQUIRE(b.dimension == 14);
  for (const auto& c : o["cases"]) {
    OneChannelParams p{c["K"], c["J"], 7};
    const Eigen::MatrixXd h = Eigen::MatrixXd(build_ring_hamiltonian(b, p));
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    auto ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues();
    auto ref = c["symmetric_eigenvalues"].get<std::vector<double>>();
    std::sort(ref.begin(), ref.end());
    // the ring Hamiltonian drops (J / 2N) sum r~^2 = 6 J / 14 from the site-resolved one
    const double shift = 6.0 * p.J / 14.0;
    REQUIRE(ref.size() == 14);
    for (int i = 0; i < 14; ++i) CHECK(ev[i] + shift == doctest::Approx(ref[i]).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("seven-ion order parameter against brute force") {
  const auto o = testutil::oracle("brute_force_rings.json");
  const auto b = RingBasis::make(RingCrystalSpec::make(2));
  for (const auto& c : o["cases"]) {
    OneChannelParams p{c["K"], c["J"], 7};
    const auto times = c["times"].get<std::vector<double>>();
    const auto ts = evolve_exact(ring_bcs_state(b), b, p, times);
    REQUIRE(ts.size() == times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
      CHECK(ts.psi[i].real() == doctest::Approx(c["psi"][i][0].get<double>()).epsilon(1e-9).scale(1.0));
      CHECK(ts.psi[i].imag() == doctest::Approx(c["psi"][i][1].get<double>()).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("Krylov propagation against dense diagonalization") {
  const auto b = RingBasis::make(RingCrystalSpec::make(3));
  const OneChannelParams p{0.8, 1.0, 19};
  const SparseMatrix h = build_ring_hamiltonian(b, p);
  const ExactState v0 = ring_bcs_state(b);
  CHECK(v0.norm() == doctest::Approx(1.0).epsilon(1e-13));
  ExactState v = v0;
  for (double t : {0.3, 1.0, 2.7}) {
    const ExactState k = krylov_propagate(h, v0, t);
    CHECK((k - dense_evolve(h, v0, t)).norm() < 1e-9);
  }
  // stepping composes
  for (int i = 0; i < 10; ++i) v = krylov_propagate(h, v, 0.27);
  CHECK((v - dense_evolve(h, v0, 2.7)).norm() < 1e-9);
}

TEST_CASE("initial observables agree with the product-state values") {
  const int rings = 4;
  const auto b = RingBasis::make(RingCrystalSpec::make(rings));
  const auto l = make_ring_crystal(rings);
  const auto s = make_bcs_state(l);
  const OneChannelParams p{1.0, 1.0, l.size()};
  const auto ts = evolve_exact(ring_bcs_state(b), b, p, {0.0, 0.5, 1.0});
  CHECK(std::abs(ts.psi[0] - order_parameter(s, l)) < 1e-12);
  CHECK(ts.sz_total[0] == doctest::Approx(s.total_sz()).epsilon(1e-12).scale(1.0));
  CHECK(ts.energy[0] == doctest::Approx(model_energy(s, l, Model::one_channel(1.0, 1.0, l.size()))).epsilon(1e-12));
  // both S^Z and the energy are conserved
  CHECK(ts.diagnostics.max_sz_drift < 1e-9);
  CHECK(ts.diagnostics.max_energy_drift < 1e-9);

  // per-ring polarization of the coherent product state
  const auto spec = RingCrystalSpec::make(rings);
  for (int m = 0; m < rings; ++m) {
    const ExactState v = ring_bcs_state(b);
    const double jz = v.dot(ring_jz(b, m) * v).real();
    CHECK(jz / spec.populations[m] == doctest::Approx(0.5 * std::cos(kPi * spec.radii[m])).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("input checks") {
  const auto b = RingBasis::make(RingCrystalSpec::make(2));
  const OneChannelParams p{1.0, 1.0, 7};
  ExactState bad = ring_bcs_state(b) * 2.0;
  CHECK_THROWS_AS(evolve_exact(bad, b, p, {0.0, 1.0}), Error);
  CHECK_THROWS_AS(evolve_exact(ring_bcs_state(b), b, p, {0.0, 1.0, 0.5}), Error);
  CHECK_THROWS_AS(ring_coherent_state(b, {0.1}, {0.0}), Error);
}
