#include "ringcover/models.hpp"

#include <algorithm>
#include <stdexcept>

namespace ringcover {

SensingModel SensingModel::gaussian(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gaussian sensing needs gamma > 0");
  SensingModel m;
  m.kind_ = Kind::gaussian;
  m.gamma_ = gamma;
  m.inv_gamma_sq_ = 1.0 / (gamma * gamma);
  m.name_ = "gaussian";
  return m;
}

SensingModel SensingModel::constant(double value) {
  if (!(value > 0.0 && value <= 1.0)) {
    throw std::invalid_argument("constant sensing probability must be in (0, 1]");
  }
  SensingModel m;
  m.kind_ = Kind::constant;
  m.constant_ = value;
  m.name_ = "constant";
  return m;
}

SensingModel SensingModel::custom(Fn prob, Fn deriv, std::string name) {
  if (!prob || !deriv) throw std::invalid_argument("custom sensing needs f and df/dd");
  SensingModel m;
  m.kind_ = Kind::custom;
  m.prob_ = std::move(prob);
  m.deriv_ = std::move(deriv);
  m.name_ = std::move(name);
  return m;
}

SensingModel gaussian_model(double gamma) { return SensingModel::gaussian(gamma); }

DensityModel DensityModel::uniform(double total_mass) {
  if (!(total_mass > 0.0)) throw std::invalid_argument("uniform density needs positive mass");
  DensityModel m;
  m.kind_ = Kind::uniform;
  m.name_ = "uniform";
  m.uniform_value_ = total_mass / kTwoPi;
  m.raw_mass_ = total_mass;
  return m;
}

DensityModel DensityModel::linear_phase() {
  DensityModel m;
  m.kind_ = Kind::linear_phase;
  m.name_ = "linear_phase";
  m.raw_mass_ = 1.0;
  return m;
}

DensityModel DensityModel::table(std::vector<std::pair<double, double>> samples) {
  if (samples.size() < 2) throw std::invalid_argument("table density needs at least two samples");
  DensityModel m;
  m.kind_ = Kind::table;
  m.name_ = "table";
  m.samples_ = samples;
  for (auto& [theta, rho] : samples) {
    if (!(rho >= 0.0)) throw std::invalid_argument("table density values must be non-negative");
    theta = wrap_angle(theta);
  }
  std::sort(samples.begin(), samples.end());
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].first <= samples[i - 1].first) {
      throw std::invalid_argument("table density samples must have distinct phases");
    }
  }
  // value at the seam, interpolated between the last and first samples
  const auto& lo = samples.back();
  const auto& hi = samples.front();
  const double span = hi.first + kTwoPi - lo.first;
  const double seam = lo.second + (hi.second - lo.second) * ((kTwoPi - lo.first) / span);

  m.knot_theta_.push_back(0.0);
  m.knot_rho_.push_back(seam);
  for (const auto& [theta, rho] : samples) {
    if (theta == 0.0) {
      m.knot_rho_.front() = rho;
      continue;
    }
    m.knot_theta_.push_back(theta);
    m.knot_rho_.push_back(rho);
  }
  m.knot_theta_.push_back(kTwoPi);
  m.knot_rho_.push_back(m.knot_rho_.front());

  m.knot_cum_.assign(m.knot_theta_.size(), 0.0);
  for (std::size_t i = 1; i < m.knot_theta_.size(); ++i) {
    const double w = m.knot_theta_[i] - m.knot_theta_[i - 1];
    m.knot_cum_[i] = m.knot_cum_[i - 1] + 0.5 * w * (m.knot_rho_[i] + m.knot_rho_[i - 1]);
  }
  m.raw_mass_ = m.knot_cum_.back();
  if (!(m.raw_mass_ > 0.0)) throw std::invalid_argument("table density has zero mass");
  return m;
}

DensityModel DensityModel::custom(Fn rho, std::string name, int grid_cells) {
  if (!rho) throw std::invalid_argument("custom density needs a function");
  if (grid_cells < 8) throw std::invalid_argument("custom density grid needs at least 8 cells");
  DensityModel m;
  m.kind_ = Kind::custom;
  m.name_ = std::move(name);
  m.rho_ = std::move(rho);
  m.cell_width_ = kTwoPi / grid_cells;
  const int n_half = 2 * grid_cells + 1;
  std::vector<double> values(static_cast<std::size_t>(n_half));
  const double half = 0.5 * m.cell_width_;
  for (int k = 0; k < n_half; ++k) {
    const double v = m.rho_(half * k);
    if (!(v >= 0.0)) throw std::invalid_argument("custom density must be non-negative");
    values[static_cast<std::size_t>(k)] = v;
  }
  m.cum_half_.assign(static_cast<std::size_t>(n_half), 0.0);
  for (int j = 0; j < grid_cells; ++j) {
    const auto lo = static_cast<std::size_t>(2 * j);
    const double a = half * (2 * j);
    const double mid = half * (2 * j + 1);
    m.cum_half_[lo + 1] =
        m.cum_half_[lo] + half / 6.0 * (values[lo] + 4.0 * m.rho_(0.5 * (a + mid)) + values[lo + 1]);
    m.cum_half_[lo + 2] =
        m.cum_half_[lo] + m.cell_width_ / 6.0 * (values[lo] + 4.0 * values[lo + 1] + values[lo + 2]);
  }
  m.raw_mass_ = m.cum_half_.back();
  if (!(m.raw_mass_ > 0.0)) throw std::invalid_argument("custom density has zero mass");
  return m;
}

double DensityModel::raw_density(double theta) const {
  switch (kind_) {
    case Kind::uniform:
      return uniform_value_;
    case Kind::linear_phase:
      return theta / (2.0 * kPi * kPi);
    case Kind::table: {
      auto hi = std::upper_bound(knot_theta_.begin(), knot_theta_.end(), theta);
      if (hi == knot_theta_.end()) return knot_rho_.back();
      if (hi == knot_theta_.begin()) return knot_rho_.front();
      const auto i = static_cast<std::size_t>(hi - knot_theta_.begin());
      const double t = (theta - knot_theta_[i - 1]) / (knot_theta_[i] - knot_theta_[i - 1]);
      return knot_rho_[i - 1] + t * (knot_rho_[i] - knot_rho_[i - 1]);
    }
    case Kind::custom:
      return rho_(theta);
  }
  return 0.0;
}

double DensityModel::raw_cumulative(double theta) const {
  theta = std::clamp(theta, 0.0, kTwoPi);
  switch (kind_) {
    case Kind::uniform:
      return uniform_value_ * theta;
    case Kind::linear_phase:
      return theta * theta / (4.0 * kPi * kPi);
    case Kind::table: {
      auto hi = std::upper_bound(knot_theta_.begin(), knot_theta_.end(), theta);
      if (hi == knot_theta_.end()) return knot_cum_.back();
      const auto i = static_cast<std::size_t>(hi - knot_theta_.begin());
      const double t0 = knot_theta_[i - 1];
      return knot_cum_[i - 1] + 0.5 * (theta - t0) * (knot_rho_[i - 1] + raw_density(theta));
    }
    case Kind::custom: {
      if (theta >= kTwoPi) return raw_mass_;
      const double half = 0.5 * cell_width_;
      const int last = static_cast<int>(cum_half_.size()) - 2;
      const int k = std::clamp(static_cast<int>(theta / half), 0, last);
      const double t0 = half * k;
      const double base = cum_half_[static_cast<std::size_t>(k)];
      if (theta == t0) return base;
      return base + (theta - t0) / 6.0 *
                        (rho_(t0) + 4.0 * rho_(0.5 * (t0 + theta)) + rho_(theta));
    }
  }
  return 0.0;
}

double DensityModel::cumulative(double theta) const { return scale_ * raw_cumulative(theta); }

DensityModel DensityModel::normalized_copy() const {
  const double mass = total_mass();
  if (!(mass > 0.0)) throw std::invalid_argument("cannot normalize a zero-mass density");
  DensityModel m = *this;
  m.scale_ = scale_ / mass;
  return m;
}

double DensityModel::segment_mass(Phase start, Phase end) const {
  if (start == end) return 0.0;
  return segment_mass(start, ccw_gap(end, start));
}

double DensityModel::segment_mass(Phase start, double width) const {
  if (width <= 0.0) return 0.0;
  const double a = start.value();
  const double b = a + std::min(width, kTwoPi);
  if (b <= kTwoPi) return cumulative(b) - cumulative(a);
  return (total_mass() - cumulative(a)) + cumulative(b - kTwoPi);
}

DensityModel linear_phase_density() { return DensityModel::linear_phase(); }

}  // namespace ringcover
