#include "pwave/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace pwave;

TEST_CASE("philox4x32-10 known answers") {
  // reference vectors of the Random123 distribution
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        PhiloxBlock{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                      {0xffffffffu, 0xffffffffu}) ==
        PhiloxBlock{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                      {0xa4093822u, 0x299f31d0u}) ==
        PhiloxBlock{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and distinct") {
  PhiloxStream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 16; ++i) {
    const auto x = a.next_u32();
    CHECK(x == b.next_u32());
    differs_c |= x != c.next_u32();
    differs_d |= x != d.next_u32();
  }
  CHECK(differs_c);
  CHECK(differs_d);
}

TEST_CASE("distribution moments") {
  PhiloxStream s(1, 0);
  const int n = 200000;
  double mu = 0, m2 = 0, sg = 0, un = 0;
  for (int i = 0; i < n; ++i) {
    const double g = s.normal();
    mu += g;
    m2 += g * g;
    sg += s.sign();
    const double u = s.uniform();
    CHECK_UNARY(u >= 0.0 && u < 1.0);
    un += u;
  }
  // five standard errors
  CHECK(std::abs(mu / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(m2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(sg / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(un / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
}
