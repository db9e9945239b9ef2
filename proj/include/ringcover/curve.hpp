#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ringcover/phase.hpp"

namespace ringcover {

inline constexpr int kDefaultGridCells = 4096;

struct CircleSpec {
  double radius = 1.0;
};

/// R(theta) = base + amplitude * sin(frequency * theta)
struct SinusoidSpec {
  double base = 1.0;
  double amplitude = 0.0;
  double frequency = 1.0;
};

/// Periodic piecewise-linear R(theta) through (theta, R) samples.
struct TableSpec {
  std::vector<std::pair<double, double>> samples;
};

/// Curves built from bare functions carry no serializable description.
struct CustomSpec {
  std::string name;
};

using CurveSpec = std::variant<CircleSpec, SinusoidSpec, TableSpec, CustomSpec>;

/// A closed star-shaped layer R(theta) about the origin, with a cached
/// arc-length table.
///
/// Arc length is tabulated on a half-cell grid (2n + 1 points for n cells):
/// node values come from composite Simpson over whole cells, midpoint values
/// from a half-cell Simpson panel. Off-grid lookups add one Simpson panel
/// from the nearest tabulated point below, so arc_at() is smooth in theta and
/// its derivative matches speed() to quadrature accuracy.
class LayerCurve {
 public:
  using Fn = std::function<double(double)>;

  /// `radius_deriv` may be empty; central differences (step 1e-6) are used then.
  LayerCurve(Fn radius, Fn radius_deriv, int grid_cells = kDefaultGridCells,
             CurveSpec spec = CustomSpec{"custom"});

  static LayerCurve circle(double radius, int grid_cells = kDefaultGridCells);
  static LayerCurve sinusoid(double base, double amplitude, double frequency,
                             int grid_cells = kDefaultGridCells);
  static LayerCurve table(std::vector<std::pair<double, double>> samples,
                          int grid_cells = kDefaultGridCells);
  static LayerCurve from_spec(const CurveSpec& spec, int grid_cells = kDefaultGridCells);

  // theta is taken in [0, 2pi]; the curve is periodic so 2pi equals 0.
  double radius(double theta) const { return radius_(theta); }
  double radius(Phase theta) const { return radius_(theta.value()); }
  double radius_deriv(double theta) const;
  double radius_deriv(Phase theta) const { return radius_deriv(theta.value()); }
  /// |dp/dtheta| = sqrt(R^2 + R'^2)
  double speed(double theta) const;
  double speed(Phase theta) const { return speed(theta.value()); }

  double total_length() const noexcept { return total_length_; }

  /// Cumulative arc length from theta = 0 counterclockwise to `theta` in [0, 2pi].
  double arc_at(double theta) const;
  double arc_at(Phase theta) const { return arc_at(theta.value()); }

  /// Counterclockwise arc length from `from` to `to`, in [0, total_length].
  double arc_length_between(Phase from, Phase to) const;

  /// Shorter of the two arcs between a and b.
  double geodesic_dist(Phase a, Phase b) const;

  /// Inverse of arc_at: binary search plus linear interpolation on the table,
  /// polished with Newton steps. `s` is reduced modulo total_length.
  Phase phase_at_arc(double s) const;

  /// Point halfway (in arc length) along the counterclockwise arc from `from`
  /// to `to`. Equal endpoints mean the full loop, giving the antipode.
  Phase arc_midpoint(Phase from, Phase to) const;

  /// The point at geodesic distance total_length / 2 from `p`.
  Phase antipode(Phase p) const;

  int grid_cells() const noexcept { return cells_; }
  double cell_width() const noexcept { return cell_width_; }
  int half_points() const noexcept { return 2 * cells_ + 1; }
  double half_theta(int m) const noexcept { return 0.5 * cell_width_ * m; }
  double arc_half(int m) const noexcept { return arc_[static_cast<std::size_t>(m)]; }
  double speed_half(int m) const noexcept { return speed_[static_cast<std::size_t>(m)]; }

  double min_radius() const noexcept { return min_radius_; }
  double max_radius() const noexcept { return max_radius_; }

  const CurveSpec& spec() const noexcept { return spec_; }
  bool is_circle() const noexcept { return std::holds_alternative<CircleSpec>(spec_); }

 private:
  double simpson_panel(double a, double b) const;

  Fn radius_;
  Fn radius_deriv_;
  CurveSpec spec_;
  int cells_;
  double cell_width_;
  std::vector<double> arc_;
  std::vector<double> speed_;
  double total_length_ = 0.0;
  double min_radius_ = 0.0;
  double max_radius_ = 0.0;
};

/// Throws std::invalid_argument unless every curve is strictly inside the next
/// one on the grid of the innermost curve.
void check_nested(std::span<const LayerCurve* const> inner_to_outer);

}  // namespace ringcover
