#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ringcover/curve.hpp"

using namespace ringcover;

namespace {

// Trapezoid rule over one period of a smooth periodic integrand converges
// spectrally, so a dense grid gives an independent reference length.
double trapezoid_length(double base, double amp, double freq, int points) {
  double sum = 0.0;
  const double h = kTwoPi / points;
  for (int k = 0; k < points; ++k) {
    const double t = h * k;
    const double r = base + amp * std::sin(freq * t);
    const double dr = amp * freq * std::cos(freq * t);
    sum += std::sqrt(r * r + dr * dr);
  }
  return sum * h;
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("unit circle arc lengths") {
    const LayerCurve c = LayerCurve::circle(1.0);
    CHECK(c.total_length() == doctest::Approx(kTwoPi).epsilon(1e-13));
    CHECK(c.arc_length_between(Phase(0.0), Phase(kPi)) == doctest::Approx(kPi));
    CHECK(c.arc_length_between(Phase(1.1), Phase(1.1)) == 0.0);
    CHECK(c.geodesic_dist(Phase(0.0), Phase(kPi)) == doctest::Approx(kPi));
    CHECK(c.geodesic_dist(Phase(0.0), Phase(3 * kPi / 2)) == doctest::Approx(kPi / 2));
    CHECK(c.geodesic_dist(Phase(2.0), Phase(2.0)) == 0.0);
    CHECK(c.arc_length_between(Phase(3.0), Phase(1.0)) == doctest::Approx(kTwoPi - 2.0));
  }

  TEST_CASE("layer lengths match a dense trapezoid reference") {
    struct Layer {
      double base, amp, freq;
    };
    for (Layer l : {Layer{1.0, 0.15, 4.0}, Layer{2.0, 0.15, 10.0}, Layer{3.0, 0.15, 40.0}}) {
      const LayerCurve c = LayerCurve::sinusoid(l.base, l.amp, l.freq);
      const double reference = trapezoid_length(l.base, l.amp, l.freq, 1 << 20);
      CHECK(std::abs(c.total_length() - reference) / reference < 1e-8);
      // a full loop starting anywhere returns the total length
      const Phase start(0.7);
      const double loop = c.arc_length_between(start, Phase(std::nextafter(0.7, 0.0)));
      CHECK(std::abs(loop - c.total_length()) / c.total_length() < 1e-8);
    }
  }

  TEST_CASE("arc table is strictly increasing") {
    const LayerCurve c = LayerCurve::sinusoid(3.0, 0.15, 40.0, 512);
    for (int m = 1; m < c.half_points(); ++m) CHECK(c.arc_half(m) > c.arc_half(m - 1));
  }

  TEST_CASE("off-grid lookups agree with a fine reference") {
    const LayerCurve coarse = LayerCurve::sinusoid(1.0, 0.15, 4.0, 256);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    for (int k = 0; k < 200; ++k) {
      const double t = u(rng);
      double ref = 0.0;
      const int steps = 20000;
      const double h = t / steps;
      for (int j = 0; j <= steps; ++j) {
        const double w = (j == 0 || j == steps) ? 0.5 : 1.0;
        ref += w * coarse.speed(h * j);
      }
      ref *= h;
      CHECK(coarse.arc_at(t) == doctest::Approx(ref).epsilon(1e-7));
    }
  }

  TEST_CASE("phase_at_arc inverts arc_at") {
    const LayerCurve c = LayerCurve::sinusoid(2.0, 0.15, 10.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    for (int k = 0; k < 500; ++k) {
      const Phase p(u(rng));
      const Phase back = c.phase_at_arc(c.arc_at(p));
      CHECK(ang_dist(p, back) < 1e-12);
    }
    CHECK(c.phase_at_arc(0.0).value() == 0.0);
    CHECK(c.phase_at_arc(c.total_length()).value() == doctest::Approx(0.0));
  }

  TEST_CASE("midpoints and antipodes are equidistant") {
    const LayerCurve c = LayerCurve::sinusoid(3.0, 0.15, 40.0);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    for (int k = 0; k < 200; ++k) {
      const Phase a(u(rng));
      const Phase b(u(rng));
      const Phase m = c.arc_midpoint(a, b);
      CHECK(std::abs(c.geodesic_dist(a, m) - c.geodesic_dist(m, b)) < 1e-9);
      const Phase anti = c.antipode(a);
      CHECK(c.geodesic_dist(a, anti) == doctest::Approx(0.5 * c.total_length()).epsilon(1e-12));
    }
  }

  TEST_CASE("geodesic distance is a metric on samples") {
    const LayerCurve c = LayerCurve::sinusoid(1.0, 0.15, 4.0);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    for (int k = 0; k < 2000; ++k) {
      const Phase a(u(rng));
      const Phase b(u(rng));
      const Phase x(u(rng));
      const double ab = c.geodesic_dist(a, b);
      CHECK(ab == doctest::Approx(c.geodesic_dist(b, a)).epsilon(1e-12));
      CHECK(ab <= 0.5 * c.total_length() + 1e-12);
      CHECK(ab <= c.geodesic_dist(a, x) + c.geodesic_dist(x, b) + 1e-12);
    }
  }

  TEST_CASE("finite-difference derivative when none is supplied") {
    const LayerCurve analytic = LayerCurve::sinusoid(2.0, 0.15, 10.0);
    const LayerCurve numeric([](double t) { return 2.0 + 0.15 * std::sin(10.0 * t); }, nullptr);
    CHECK(numeric.total_length() == doctest::Approx(analytic.total_length()).epsilon(1e-9));
    CHECK(numeric.radius_deriv(0.3) == doctest::Approx(analytic.radius_deriv(0.3)).epsilon(1e-8));
  }

  TEST_CASE("table curves interpolate periodically") {
    const LayerCurve t = LayerCurve::table({{0.0, 1.0}, {kPi, 2.0}});
    CHECK(t.radius(kPi / 2) == doctest::Approx(1.5));
    CHECK(t.radius(3 * kPi / 2) == doctest::Approx(1.5));
    CHECK(t.radius(0.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(LayerCurve::table({{1.0, 1.0}}), std::invalid_argument);
  }

  TEST_CASE("rejects non-positive radius and unnested layers") {
    CHECK_THROWS_AS(LayerCurve::circle(0.0), std::invalid_argument);
    CHECK_THROWS_AS(LayerCurve::sinusoid(0.1, 0.2, 3.0), std::invalid_argument);
    const LayerCurve a = LayerCurve::sinusoid(1.0, 0.15, 4.0, 256);
    const LayerCurve b = LayerCurve::sinusoid(2.0, 0.15, 10.0, 256);
    const LayerCurve c = LayerCurve::sinusoid(1.1, 0.15, 40.0, 256);
    const LayerCurve* good[] = {&a, &b};
    CHECK_NOTHROW(check_nested(good));
    const LayerCurve* bad[] = {&a, &c};
    CHECK_THROWS_AS(check_nested(bad), std::invalid_argument);
  }

  TEST_CASE("specs rebuild equal curves") {
    const LayerCurve c = LayerCurve::sinusoid(2.0, 0.15, 10.0, 512);
    const LayerCurve d = LayerCurve::from_spec(c.spec(), 512);
    CHECK(d.total_length() == c.total_length());
    CHECK(LayerCurve::circle(2.0).is_circle());
  }
}
