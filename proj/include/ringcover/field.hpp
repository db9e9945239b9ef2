#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <memory>
#include <stdexcept>
#include <vector>

#include "ringcover/curve.hpp"
#include "ringcover/models.hpp"

namespace ringcover {

/// The three integrals over a segment that every controller step needs.
struct SegmentIntegrals {
  double coverage = 0.0;  // int f(d(phi, theta)) rho dtheta
  double mass = 0.0;      // int rho dtheta
  double gradient = 0.0;  // int d f(d(phi, theta)) / d phi * rho dtheta

  SegmentIntegrals& operator+=(const SegmentIntegrals& o) noexcept {
    coverage += o.coverage;
    mass += o.mass;
    gradient += o.gradient;
    return *this;
  }
  friend SegmentIntegrals operator*(double w, const SegmentIntegrals& v) noexcept {
    return {w * v.coverage, w * v.mass, w * v.gradient};
  }
};

/// A layer curve together with the sensing and density models used on it.
/// Owns a copy of the curve and caches rho on the curve's half-cell grid.
class LayerField {
 public:
  LayerField(LayerCurve curve, SensingModel sensing, DensityModel density);

  const LayerCurve& curve() const noexcept { return *curve_; }
  const SensingModel& sensing() const noexcept { return sensing_; }
  const DensityModel& density() const noexcept { return density_; }

  double rho_half(int m) const noexcept { return rho_half_[static_cast<std::size_t>(m)]; }

  /// Geodesic distance d on this layer.
  double distance(Phase a, Phase b) const { return curve_->geodesic_dist(a, b); }

  /// Coverage, mass and phi-gradient over the counterclockwise arc of angular
  /// `width` in (0, 2pi] starting at `start`, for an agent at `phi`.
  SegmentIntegrals integrate(Phase phi, Phase start, double width) const;

  /// Integral of rho(theta) f(d(phi, theta)) over the arc.
  double coverage(Phase phi, Phase start, double width) const {
    return integrate(phi, start, width).coverage;
  }

  /// Composite Simpson over the counterclockwise arc [start, start + width],
  /// split at the 2pi seam and at every phase in `breaks`. For each smooth
  /// piece, `make(a, b)` is called with local bounds in [0, 2pi] and must
  /// return a kernel g(theta, half_index) where half_index is the curve's
  /// half-grid index of theta, or -1 off the grid. Returns the summed value.
  template <class V, class Make>
  V integrate_pieces(Phase start, double width, std::initializer_list<Phase> breaks,
                     Make&& make) const;

 private:
  template <class V, class G>
  V simpson_piece(double a, double b, G& g) const;

  std::shared_ptr<const LayerCurve> curve_;
  SensingModel sensing_;
  DensityModel density_;
  std::vector<double> rho_half_;
};

template <class V, class G>
V LayerField::simpson_piece(double a, double b, G& g) const {
  const LayerCurve& c = *curve_;
  V acc{};
  auto panel = [&](double x, int ix, double y, int iy) {
    const double mid = 0.5 * (x + y);
    V part = g(x, ix);
    part += 4.0 * g(mid, -1);
    part += g(y, iy);
    acc += ((y - x) / 6.0) * part;
  };
  const double h = c.cell_width();
  const int n = c.grid_cells();
  int j0 = std::clamp(static_cast<int>(std::ceil(a / h)), 0, n);
  int j1 = std::clamp(static_cast<int>(std::floor(b / h)), 0, n);
  if (j0 <= n && c.half_theta(2 * j0) < a) ++j0;
  if (j1 >= 0 && c.half_theta(2 * j1) > b) --j1;
  if (j0 > j1) {
    panel(a, -1, b, -1);
    return acc;
  }
  const double x0 = c.half_theta(2 * j0);
  const double x1 = c.half_theta(2 * j1);
  if (a < x0) panel(a, -1, x0, 2 * j0);
  if (j1 > j0) {
    V inner{};
    V odd{};
    for (int m = 2 * j0 + 1; m < 2 * j1; m += 2) odd += g(c.half_theta(m), m);
    V even{};
    for (int m = 2 * j0 + 2; m < 2 * j1; m += 2) even += g(c.half_theta(m), m);
    inner += g(x0, 2 * j0);
    inner += g(x1, 2 * j1);
    inner += 4.0 * odd;
    inner += 2.0 * even;
    acc += (h / 6.0) * inner;
  }
  if (x1 < b) panel(x1, 2 * j1, b, -1);
  return acc;
}

template <class V, class Make>
V LayerField::integrate_pieces(Phase start, double width, std::initializer_list<Phase> breaks,
                               Make&& make) const {
  if (!(width > 0.0)) return V{};
  width = std::min(width, kTwoPi);
  const double a0 = start.value();
  const double end = a0 + width;
  std::array<double, 12> cuts{};
  std::size_t count = 0;
  cuts[count++] = a0;
  auto add = [&](double u) {
    if (u > a0 && u < end) {
      if (count + 1 >= cuts.size()) throw std::length_error("too many integration breaks");
      cuts[count++] = u;
    }
  };
  add(kTwoPi);
  for (Phase p : breaks) add(a0 + ccw_gap(p, start));
  std::sort(cuts.begin() + 1, cuts.begin() + static_cast<std::ptrdiff_t>(count));
  cuts[count++] = end;

  V total{};
  for (std::size_t k = 0; k + 1 < count; ++k) {
    const double u0 = cuts[k];
    const double u1 = cuts[k + 1];
    if (!(u1 > u0)) continue;
    const double offset = 0.5 * (u0 + u1) >= kTwoPi ? kTwoPi : 0.0;
    const double a = std::clamp(u0 - offset, 0.0, kTwoPi);
    const double b = std::clamp(u1 - offset, 0.0, kTwoPi);
    if (!(b > a)) continue;
    auto g = make(a, b);
    total += simpson_piece<V>(a, b, g);
  }
  return total;
}

}  // namespace ringcover
