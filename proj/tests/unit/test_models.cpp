#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ringcover/models.hpp"

using namespace ringcover;

TEST_SUITE("models") {
  TEST_CASE("gaussian sensing values") {
    const SensingModel f = gaussian_model(1.0);
    CHECK(f.detect_prob(0.0) == 1.0);
    CHECK(f.detect_prob(1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(f.detect_prob(1.0) == doctest::Approx(0.36787944117144233));
    const SensingModel g = gaussian_model(2.0);
    CHECK(g.detect_prob(2.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(g.gamma() == 2.0);
    CHECK_THROWS_AS(gaussian_model(0.0), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_model(-1.0), std::invalid_argument);
  }

  TEST_CASE("sensing models are decreasing with consistent derivatives") {
    const std::vector<SensingModel> models = {
        gaussian_model(1.0), gaussian_model(0.3), SensingModel::constant(0.8),
        SensingModel::custom([](double d) { return 1.0 / (1.0 + d * d); },
                             [](double d) { return -2.0 * d / ((1.0 + d * d) * (1.0 + d * d)); },
                             "lorentzian")};
    for (const SensingModel& f : models) {
      double previous = f.detect_prob(0.0);
      for (int k = 1; k <= 100; ++k) {
        const double d = 0.03 * k;
        const double p = f.detect_prob(d);
        CHECK(p <= previous);
        CHECK(p > 0.0);
        CHECK(p <= 1.0);
        previous = p;
        const double step = 1e-6;
        const double fd = (f.detect_prob(d + step) - f.detect_prob(d - step)) / (2 * step);
        const double an = f.detect_prob_deriv(d);
        if (an == 0.0) {
          CHECK(std::abs(fd) < 1e-12);
        } else {
          CHECK(std::abs(fd - an) <= 1e-5 * std::abs(an));
        }
      }
    }
  }

  TEST_CASE("uniform and linear densities") {
    const DensityModel u = DensityModel::uniform();
    CHECK(u.density(1.0) == doctest::Approx(1.0 / kTwoPi));
    CHECK(u.segment_mass(Phase(0.0), Phase(kPi)) == doctest::Approx(0.5));
    CHECK(u.segment_mass(Phase(2.0), Phase(2.0)) == 0.0);
    CHECK(u.normalized());

    const DensityModel l = linear_phase_density();
    CHECK(l.density(0.0) == 0.0);
    CHECK(l.density(kPi) == doctest::Approx(1.0 / kTwoPi));
    CHECK(l.total_mass() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(l.segment_mass(Phase(0.0), kTwoPi) == doctest::Approx(1.0));
    CHECK(l.segment_mass(Phase(0.0), Phase(std::nextafter(kTwoPi, 0.0))) ==
          doctest::Approx(1.0));
    // the left limit at the seam
    CHECK(l.density(kTwoPi) == doctest::Approx(1.0 / kPi));
    CHECK(l.normalized());
    // the arc from 3pi/2 through the seam to pi/2: (1 - 9/16) + 1/16
    CHECK(l.segment_mass(Phase(3 * kPi / 2), Phase(kPi / 2)) == doctest::Approx(0.5));
  }

  TEST_CASE("table and custom densities") {
    const DensityModel t = DensityModel::table({{0.0, 1.0}, {kPi, 3.0}});
    CHECK(t.density(kPi / 2) == doctest::Approx(2.0));
    CHECK(t.total_mass() == doctest::Approx(4.0 * kPi));
    const DensityModel tn = t.normalized_copy();
    CHECK(tn.normalized());
    CHECK(tn.density(kPi / 2) == doctest::Approx(2.0 / (4.0 * kPi)));
    CHECK_THROWS_AS(DensityModel::table({{0.0, -1.0}, {1.0, 1.0}}), std::invalid_argument);

    const DensityModel c = DensityModel::custom(
        [](double theta) { return 1.0 + std::cos(theta); }, "raised cosine");
    CHECK(c.total_mass() == doctest::Approx(kTwoPi).epsilon(1e-12));
    CHECK(c.segment_mass(Phase(0.0), Phase(kPi)) == doctest::Approx(kPi).epsilon(1e-12));
    CHECK_FALSE(c.normalized());
    CHECK(c.normalized_copy().normalized());
  }

  TEST_CASE("segment mass is additive") {
    const std::vector<DensityModel> densities = {
        DensityModel::uniform(), linear_phase_density(),
        DensityModel::table({{0.3, 1.0}, {2.0, 0.2}, {4.0, 2.5}}),
        DensityModel::custom([](double theta) { return 2.0 + std::sin(3.0 * theta); }, "wave")};
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    for (const DensityModel& rho : densities) {
      for (int k = 0; k < 500; ++k) {
        const Phase a(u(rng));
        const double w1 = u(rng) / 2;
        const double w2 = u(rng) / 2;
        const Phase b = a + w1;
        const double lhs = rho.segment_mass(a, w1) + rho.segment_mass(b, w2);
        const double rhs = rho.segment_mass(a, w1 + w2);
        CHECK(std::abs(lhs - rhs) <= 1e-10);
        CHECK(rho.segment_mass(a, w1) >= 0.0);
      }
    }
  }
}
