#include "ringcover/phase.hpp"

#include <cmath>

namespace ringcover {

Phase phase_of(double x, double y) noexcept {
  if (x < 0.0) return Phase(std::atan(y / x) + kPi);
  if (x > 0.0) {
    if (y >= 0.0) return Phase(std::atan(y / x));
    return Phase(std::atan(y / x) + kTwoPi);
  }
  if (y > 0.0) return Phase(kPi / 2.0);
  if (y < 0.0) return Phase(-kPi / 2.0);  // reduced to 3pi/2 by Phase
  return Phase(0.0);
}

double ang_diff(Phase a, Phase b) noexcept {
  const double diff = a.value() - b.value();
  if (diff > kPi) return diff - kTwoPi;
  if (diff <= -kPi) return diff + kTwoPi;
  return diff;
}

double ang_dist(Phase a, Phase b) noexcept { return std::abs(ang_diff(a, b)); }

double ccw_gap(Phase a, Phase b) noexcept {
  return wrap_angle(a.value() - b.value());
}

}  // namespace ringcover
