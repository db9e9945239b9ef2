#include "ringcover/curve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ringcover {

namespace {

constexpr double kDerivStep = 1e-6;

std::function<double(double)> table_interpolant(std::vector<std::pair<double, double>> samples) {
  if (samples.size() < 2) throw std::invalid_argument("table curve needs at least two samples");
  for (auto& [theta, r] : samples) theta = wrap_angle(theta);
  std::sort(samples.begin(), samples.end());
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].first - samples[i - 1].first <= 0.0) {
      throw std::invalid_argument("table samples must have distinct phases");
    }
  }
  return [s = std::move(samples)](double theta) {
    theta = wrap_angle(theta);
    auto hi = std::upper_bound(s.begin(), s.end(), theta,
                               [](double t, const auto& p) { return t < p.first; });
    const auto& b = hi == s.end() ? s.front() : *hi;
    const auto& a = hi == s.begin() ? s.back() : *(hi - 1);
    double span = b.first - a.first;
    double offset = theta - a.first;
    if (span <= 0.0) span += kTwoPi;
    if (offset < 0.0) offset += kTwoPi;
    return a.second + (b.second - a.second) * (offset / span);
  };
}

}  // namespace

LayerCurve::LayerCurve(Fn radius, Fn radius_deriv, int grid_cells, CurveSpec spec)
    : radius_(std::move(radius)),
      radius_deriv_(std::move(radius_deriv)),
      spec_(std::move(spec)),
      cells_(grid_cells),
      cell_width_(kTwoPi / grid_cells) {
  if (!radius_) throw std::invalid_argument("curve needs a radius function");
  if (grid_cells < 8) throw std::invalid_argument("curve grid needs at least 8 cells");

  const int n_half = half_points();
  speed_.resize(static_cast<std::size_t>(n_half));
  arc_.assign(static_cast<std::size_t>(n_half), 0.0);
  min_radius_ = radius_(0.0);
  max_radius_ = min_radius_;
  for (int m = 0; m < n_half; ++m) {
    const double theta = half_theta(m);
    const double r = radius_(theta);
    if (!(r > 0.0)) {
      throw std::invalid_argument("curve radius must be positive; R(" + std::to_string(theta) +
                                  ") = " + std::to_string(r));
    }
    min_radius_ = std::min(min_radius_, r);
    max_radius_ = std::max(max_radius_, r);
    speed_[static_cast<std::size_t>(m)] = speed(theta);
  }

  for (int j = 0; j < cells_; ++j) {
    const auto lo = static_cast<std::size_t>(2 * j);
    const double a = half_theta(2 * j);
    const double mid = half_theta(2 * j + 1);
    const double b = half_theta(2 * j + 2);
    arc_[lo + 1] = arc_[lo] + simpson_panel(a, mid);
    arc_[lo + 2] =
        arc_[lo] + (b - a) / 6.0 * (speed_[lo] + 4.0 * speed_[lo + 1] + speed_[lo + 2]);
  }
  total_length_ = arc_.back();
}

LayerCurve LayerCurve::circle(double radius, int grid_cells) {
  if (!(radius > 0.0)) throw std::invalid_argument("circle radius must be positive");
  return LayerCurve([radius](double) { return radius; }, [](double) { return 0.0; }, grid_cells,
                    CircleSpec{radius});
}

LayerCurve LayerCurve::sinusoid(double base, double amplitude, double frequency, int grid_cells) {
  return LayerCurve(
      [=](double t) { return base + amplitude * std::sin(frequency * t); },
      [=](double t) { return amplitude * frequency * std::cos(frequency * t); }, grid_cells,
      SinusoidSpec{base, amplitude, frequency});
}

LayerCurve LayerCurve::table(std::vector<std::pair<double, double>> samples, int grid_cells) {
  TableSpec spec{samples};
  return LayerCurve(table_interpolant(std::move(samples)), nullptr, grid_cells, std::move(spec));
}

LayerCurve LayerCurve::from_spec(const CurveSpec& spec, int grid_cells) {
  struct Visitor {
    int cells;
    LayerCurve operator()(const CircleSpec& c) const { return circle(c.radius, cells); }
    LayerCurve operator()(const SinusoidSpec& s) const {
      return sinusoid(s.base, s.amplitude, s.frequency, cells);
    }
    LayerCurve operator()(const TableSpec& t) const { return table(t.samples, cells); }
    LayerCurve operator()(const CustomSpec& c) const {
      throw std::invalid_argument("custom curve '" + c.name + "' cannot be rebuilt from its spec");
    }
  };
  return std::visit(Visitor{grid_cells}, spec);
}

double LayerCurve::radius_deriv(double theta) const {
  if (radius_deriv_) return radius_deriv_(theta);
  return (radius_(theta + kDerivStep) - radius_(theta - kDerivStep)) / (2.0 * kDerivStep);
}

double LayerCurve::speed(double theta) const {
  const double r = radius_(theta);
  const double dr = radius_deriv(theta);
  return std::sqrt(r * r + dr * dr);
}

double LayerCurve::simpson_panel(double a, double b) const {
  return (b - a) / 6.0 * (speed(a) + 4.0 * speed(0.5 * (a + b)) + speed(b));
}

double LayerCurve::arc_at(double theta) const {
  if (theta >= kTwoPi) return total_length_;
  const double half = 0.5 * cell_width_;
  int m = static_cast<int>(theta / half);
  m = std::clamp(m, 0, 2 * cells_ - 1);
  const double t0 = half_theta(m);
  if (theta == t0) return arc_[static_cast<std::size_t>(m)];
  return arc_[static_cast<std::size_t>(m)] + simpson_panel(t0, theta);
}

double LayerCurve::arc_length_between(Phase from, Phase to) const {
  // wrap is decided by phase order; the arc difference alone can have the
  // wrong sign at the ulp scale
  if (to.value() >= from.value()) return std::max(0.0, arc_at(to) - arc_at(from));
  return std::clamp(total_length_ - (arc_at(from) - arc_at(to)), 0.0, total_length_);
}

double LayerCurve::geodesic_dist(Phase a, Phase b) const {
  const double arc = arc_length_between(a, b);
  return std::min(arc, total_length_ - arc);
}

Phase LayerCurve::phase_at_arc(double s) const {
  s = std::fmod(s, total_length_);
  if (s < 0.0) s += total_length_;
  auto hi = std::upper_bound(arc_.begin(), arc_.end(), s);
  int m = static_cast<int>(hi - arc_.begin()) - 1;
  m = std::clamp(m, 0, 2 * cells_ - 1);
  const double s0 = arc_[static_cast<std::size_t>(m)];
  const double s1 = arc_[static_cast<std::size_t>(m) + 1];
  const double t0 = half_theta(m);
  const double t1 = half_theta(m + 1);
  double theta = t0 + (t1 - t0) * ((s - s0) / (s1 - s0));
  for (int it = 0; it < 3; ++it) {
    const double err = arc_at(theta) - s;
    if (err == 0.0) break;
    theta = std::clamp(theta - err / speed(theta), t0, t1);
  }
  return Phase(theta);
}

Phase LayerCurve::arc_midpoint(Phase from, Phase to) const {
  double arc = arc_length_between(from, to);
  if (arc == 0.0) arc = total_length_;
  return phase_at_arc(arc_at(from) + 0.5 * arc);
}

Phase LayerCurve::antipode(Phase p) const { return phase_at_arc(arc_at(p) + 0.5 * total_length_); }

void check_nested(std::span<const LayerCurve* const> inner_to_outer) {
  for (std::size_t k = 1; k < inner_to_outer.size(); ++k) {
    const LayerCurve& inner = *inner_to_outer[k - 1];
    const LayerCurve& outer = *inner_to_outer[k];
    const int n = std::max(inner.half_points(), outer.half_points());
    for (int m = 0; m < n; ++m) {
      const double theta = kTwoPi * m / (n - 1);
      if (!(inner.radius(theta) < outer.radius(theta))) {
        throw std::invalid_argument("layer " + std::to_string(k) + " is not strictly inside layer " +
                                    std::to_string(k + 1) + " at theta = " + std::to_string(theta));
      }
    }
  }
}

}  // namespace ringcover
