#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ringcover/phase.hpp"

namespace ringcover {

/// Detection probability f(d) of an agent at distance d along its layer.
class SensingModel {
 public:
  enum class Kind { gaussian, constant, custom };
  using Fn = std::function<double(double)>;

  struct Value {
    double prob;
    double deriv;
  };

  /// f(d) = exp(-d^2 / gamma^2)
  static SensingModel gaussian(double gamma);
  /// f(d) = value for every d; distance-independent, useful as a degenerate case.
  static SensingModel constant(double value);
  static SensingModel custom(Fn prob, Fn deriv, std::string name);

  Value evaluate(double d) const {
    if (kind_ == Kind::gaussian) {
      const double e = std::exp(-d * d * inv_gamma_sq_);
      return {e, -2.0 * d * inv_gamma_sq_ * e};
    }
    if (kind_ == Kind::constant) return {constant_, 0.0};
    return {prob_(d), deriv_(d)};
  }

  double detect_prob(double d) const { return evaluate(d).prob; }
  double detect_prob_deriv(double d) const { return evaluate(d).deriv; }

  Kind kind() const noexcept { return kind_; }
  /// Width parameter; 0 for non-gaussian models.
  double gamma() const noexcept { return gamma_; }
  const std::string& name() const noexcept { return name_; }

 private:
  SensingModel() = default;

  Kind kind_ = Kind::custom;
  double gamma_ = 0.0;
  double inv_gamma_sq_ = 0.0;
  double constant_ = 1.0;
  Fn prob_;
  Fn deriv_;
  std::string name_;
};

SensingModel gaussian_model(double gamma);

/// Intrusion density rho(theta) over phases. Need not integrate to one.
///
/// density(theta) accepts theta in [0, 2pi]; at exactly 2pi it returns the
/// left limit, which differs from rho(0) for densities such as theta/(2pi^2).
class DensityModel {
 public:
  enum class Kind { uniform, linear_phase, table, custom };
  using Fn = std::function<double(double)>;

  /// Constant density with the given total mass over the circle.
  static DensityModel uniform(double total_mass = 1.0);
  /// rho(theta) = theta / (2 pi^2), unit mass.
  static DensityModel linear_phase();
  /// Periodic piecewise-linear density through (theta, rho) samples.
  static DensityModel table(std::vector<std::pair<double, double>> samples);
  /// Arbitrary non-negative density; its cumulative integral is tabulated
  /// with Simpson's rule on `grid_cells` cells.
  static DensityModel custom(Fn rho, std::string name, int grid_cells = 4096);

  double density(double theta) const { return scale_ * raw_density(theta); }
  double density(Phase theta) const { return density(theta.value()); }

  /// Integral of rho from 0 to theta, theta in [0, 2pi].
  double cumulative(double theta) const;

  double total_mass() const noexcept { return scale_ * raw_mass_; }
  /// True when the total mass is one within 1e-8.
  bool normalized() const noexcept { return std::abs(total_mass() - 1.0) <= 1e-8; }

  /// Copy rescaled to unit mass. Throws if the mass is zero.
  DensityModel normalized_copy() const;

  /// Mass of the counterclockwise arc from `start` to `end`; equal ends give 0.
  double segment_mass(Phase start, Phase end) const;
  /// Mass of the counterclockwise arc of angular `width` (in [0, 2pi]) from `start`.
  double segment_mass(Phase start, double width) const;

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<std::pair<double, double>>& samples() const noexcept { return samples_; }

 private:
  DensityModel() = default;
  double raw_density(double theta) const;
  double raw_cumulative(double theta) const;

  Kind kind_ = Kind::uniform;
  std::string name_;
  double scale_ = 1.0;
  double raw_mass_ = 0.0;
  double uniform_value_ = 0.0;
  Fn rho_;
  // table: knots over [0, 2pi] and cumulative mass at each knot
  std::vector<std::pair<double, double>> samples_;
  std::vector<double> knot_theta_;
  std::vector<double> knot_rho_;
  std::vector<double> knot_cum_;
  // custom: cumulative on a half-cell grid
  double cell_width_ = 0.0;
  std::vector<double> cum_half_;
};

DensityModel linear_phase_density();

}  // namespace ringcover
