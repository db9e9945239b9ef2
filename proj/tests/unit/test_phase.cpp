#include <cmath>
#include <random>

#include "doctest.h"
#include "ringcover/phase.hpp"

using namespace ringcover;

TEST_SUITE("geometry") {
  TEST_CASE("phase_of covers every branch") {
    CHECK(phase_of(1.0, 0.0).value() == 0.0);
    CHECK(phase_of(0.0, 1.0).value() == doctest::Approx(kPi / 2));
    CHECK(phase_of(0.0, -1.0).value() == doctest::Approx(3 * kPi / 2));
    CHECK(phase_of(-1.0, 0.0).value() == doctest::Approx(kPi));
    CHECK(phase_of(-1.0, -1.0).value() == doctest::Approx(5 * kPi / 4));
    CHECK(phase_of(1.0, -1.0).value() == doctest::Approx(7 * kPi / 4));
    CHECK(phase_of(1.0, 1.0).value() == doctest::Approx(kPi / 4));
    CHECK(phase_of(0.0, 0.0).value() == 0.0);
  }

  TEST_CASE("phase_of agrees with atan2 off the axes") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int k = 0; k < 2000; ++k) {
      const double x = u(rng);
      const double y = u(rng);
      double expected = std::atan2(y, x);
      if (expected < 0) expected += kTwoPi;
      CHECK(phase_of(x, y).value() == doctest::Approx(expected).epsilon(1e-14));
    }
  }

  TEST_CASE("angular distance and signed difference") {
    CHECK(ang_dist(Phase(1.3), Phase(1.3)) == 0.0);
    CHECK(ang_dist(Phase(kPi), Phase(0.0)) == doctest::Approx(kPi));
    CHECK(ang_dist(Phase(0.1), Phase(6.2)) == doctest::Approx(0.18318530717958623));
    CHECK(ang_diff(Phase(0.5), Phase(0.2)) == doctest::Approx(0.3));
    CHECK(ang_diff(Phase(0.2), Phase(0.5)) == doctest::Approx(-0.3));
    CHECK(ang_diff(Phase(6.2), Phase(0.1)) == doctest::Approx(-0.18318530717958623));
  }

  TEST_CASE("ccw gap") {
    CHECK(ccw_gap(Phase(0.3), Phase(0.1)) == doctest::Approx(0.2));
    CHECK(ccw_gap(Phase(0.1), Phase(0.3)) == doctest::Approx(kTwoPi - 0.2));
    CHECK(ccw_gap(Phase(2.0), Phase(2.0)) == 0.0);
  }

  TEST_CASE("phase arithmetic stays reduced") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    std::uniform_real_distribution<double> tiny(-1e-17, 1e-17);
    for (int k = 0; k < 5000; ++k) {
      const Phase p(u(rng));
      const Phase q = p + u(rng);
      const Phase r = p - u(rng);
      const Phase t(tiny(rng));
      for (Phase x : {p, q, r, t}) {
        CHECK(x.value() >= 0.0);
        CHECK(x.value() < kTwoPi);
      }
      const double g = ccw_gap(p, q);
      CHECK(g >= 0.0);
      CHECK(g < kTwoPi);
    }
  }

  TEST_CASE("distance symmetry and consistency") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    for (int k = 0; k < 5000; ++k) {
      const Phase a(u(rng));
      const Phase b(u(rng));
      CHECK(ang_dist(a, b) == ang_dist(b, a));
      CHECK(std::abs(ang_diff(a, b)) == ang_dist(a, b));
      CHECK(ang_dist(a, b) <= kPi);
      const double d = ang_diff(a, b);
      CHECK(d > -kPi);
      CHECK(d <= kPi);
    }
  }
}
