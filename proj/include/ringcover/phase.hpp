#pragma once

#include <cmath>
#include <compare>
#include <numbers>

namespace ringcover {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces any finite angle into [0, 2pi).
inline double wrap_angle(double radians) noexcept {
  if (radians >= 0.0 && radians < kTwoPi) return radians;
  double r = std::fmod(radians, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative value can round up to exactly 2pi
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// An angle about the origin, always held in [0, 2pi).
class Phase {
 public:
  constexpr Phase() noexcept = default;
  explicit Phase(double radians) noexcept : value_(wrap_angle(radians)) {}

  constexpr double value() const noexcept { return value_; }

  Phase operator+(double radians) const noexcept { return Phase(value_ + radians); }
  Phase operator-(double radians) const noexcept { return Phase(value_ - radians); }

  friend constexpr auto operator<=>(const Phase&, const Phase&) noexcept = default;

 private:
  double value_ = 0.0;
};

/// Polar angle of (x, y). Follows the six-branch definition including
/// phase_of(0, 0) == 0; the negative y-axis maps to 3pi/2.
Phase phase_of(double x, double y) noexcept;

/// Unsigned angular separation, in [0, pi].
double ang_dist(Phase a, Phase b) noexcept;

/// Signed counterclockwise difference a - b reduced into (-pi, pi].
double ang_diff(Phase a, Phase b) noexcept;

/// Counterclockwise travel from b to a, in [0, 2pi).
double ccw_gap(Phase a, Phase b) noexcept;

}  // namespace ringcover
