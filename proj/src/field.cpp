#include "ringcover/field.hpp"

namespace ringcover {

LayerField::LayerField(LayerCurve curve, SensingModel sensing, DensityModel density)
    : curve_(std::make_shared<const LayerCurve>(std::move(curve))),
      sensing_(std::move(sensing)),
      density_(std::move(density)) {
  const int n_half = curve_->half_points();
  rho_half_.resize(static_cast<std::size_t>(n_half));
  for (int m = 0; m < n_half; ++m) {
    rho_half_[static_cast<std::size_t>(m)] = density_.density(curve_->half_theta(m));
  }
  // the last node is theta = 2pi exactly, where density() gives the left limit
  rho_half_.back() = density_.density(kTwoPi);
}

SegmentIntegrals LayerField::integrate(Phase phi, Phase start, double width) const {
  const LayerCurve& c = *curve_;
  const double total = c.total_length();
  const double half_length = 0.5 * total;
  const double s_phi = c.arc_at(phi);
  const double v_phi = c.speed(phi);
  const Phase cut = c.antipode(phi);

  auto arc_from_phi = [&](double arc) {
    double a = arc - s_phi;
    if (a < 0.0) a += total;
    if (a >= total) a -= total;
    return a;
  };

  auto make = [&](double a, double b) {
    // d(phi, theta) shrinks as phi advances when theta lies on the
    // counterclockwise half, and grows otherwise
    const double ahead = arc_from_phi(c.arc_at(0.5 * (a + b)));
    const double dd_dphi = ahead < half_length ? -v_phi : v_phi;
    return [&, dd_dphi](double theta, int m) {
      double arc;
      double rho;
      if (m >= 0) {
        arc = c.arc_half(m);
        rho = rho_half_[static_cast<std::size_t>(m)];
      } else {
        arc = c.arc_at(theta);
        rho = density_.density(theta);
      }
      const double along = arc_from_phi(arc);
      const double d = std::min(along, total - along);
      const SensingModel::Value f = sensing_.evaluate(d);
      return SegmentIntegrals{f.prob * rho, rho, f.deriv * dd_dphi * rho};
    };
  };
  return integrate_pieces<SegmentIntegrals>(start, width, {phi, cut}, make);
}

}  // namespace ringcover
