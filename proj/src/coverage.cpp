#include "ringcover/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ringcover {

LayerAssembly::LayerAssembly(const LayerField& field, std::vector<Member> members)
    : field_(&field), members_(std::move(members)) {
  std::sort(members_.begin(), members_.end(),
            [](const Member& a, const Member& b) { return a.phase < b.phase; });
  std::set<int> ids;
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (!ids.insert(members_[i].id).second) {
      throw std::invalid_argument("agent " + std::to_string(members_[i].id) +
                                  " appears twice in one layer");
    }
    if (i > 0 && members_[i].phase == members_[i - 1].phase) {
      throw std::invalid_argument("agents " + std::to_string(members_[i - 1].id) + " and " +
                                  std::to_string(members_[i].id) + " share a phase");
    }
  }
}

std::size_t LayerAssembly::index_of(int id) const {
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i].id == id) return i;
  }
  throw std::out_of_range("agent " + std::to_string(id) + " is not on this layer");
}

double LayerAssembly::segment_width(std::size_t idx) const {
  if (members_.size() == 1) return kTwoPi;
  return ccw_gap(segment_end(idx), segment_start(idx));
}

double LayerAssembly::segment_length(std::size_t idx) const {
  if (members_.size() == 1) return curve().total_length();
  return curve().arc_length_between(segment_start(idx), segment_end(idx));
}

void LayerAssembly::set_midpoint_divisions() {
  if (members_.size() == 1) {
    members_[0].division = members_[0].phase + kPi;
    return;
  }
  std::vector<Phase> mids(members_.size());
  for (std::size_t i = 0; i < members_.size(); ++i) {
    mids[i] = curve().arc_midpoint(members_[alpha(i)].phase, members_[i].phase);
  }
  for (std::size_t i = 0; i < members_.size(); ++i) members_[i].division = mids[i];
}

void LayerAssembly::reset_divisions_by_phase() {
  if (members_.size() == 1) {
    members_[0].division = members_[0].phase + kPi;
    return;
  }
  for (std::size_t i = 0; i < members_.size(); ++i) {
    const Phase phi = members_[i].phase;
    members_[i].division = phi - 0.5 * ang_dist(phi, members_[alpha(i)].phase);
  }
}

void LayerAssembly::validate() const {
  const std::size_t n = members_.size();
  if (n == 0) return;
  if (n == 1) {
    if (members_[0].division == members_[0].phase) {
      throw OrderingError(members_[0].id, "lone agent sits on its own division point");
    }
    return;
  }
  double winding = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Member& m = members_[i];
    const Phase prev = members_[alpha(i)].phase;
    const double span = ccw_gap(m.phase, prev);
    const double to_division = ccw_gap(m.division, prev);
    const double division_to_agent = ccw_gap(m.phase, m.division);
    winding += span;
    if (!(span > 0.0 && to_division > 0.0 && division_to_agent > 0.0 && to_division < span)) {
      throw OrderingError(m.id, "agent " + std::to_string(m.id) +
                                    " left the arc between its division point and neighbour " +
                                    std::to_string(members_[alpha(i)].id));
    }
  }
  if (std::abs(winding - kTwoPi) > 1e-6) {
    throw OrderingError(members_[0].id, "agents no longer wind once around the origin");
  }
}

double LayerAssembly::min_gap() const {
  double gap = kTwoPi;
  for (std::size_t i = 0; i < members_.size(); ++i) {
    const Member& m = members_[i];
    gap = std::min(gap, ccw_gap(m.phase, m.division));
    gap = std::min(gap, ccw_gap(segment_end(i), m.phase));
  }
  return gap;
}

void LayerAssembly::rotate_to_ascending() {
  if (members_.empty()) return;
  auto lowest = std::min_element(members_.begin(), members_.end(),
                                 [](const Member& a, const Member& b) { return a.phase < b.phase; });
  std::rotate(members_.begin(), lowest, members_.end());
}

std::pair<Phase, Phase> segment_of(const LayerAssembly& assembly, int id) {
  const std::size_t idx = assembly.index_of(id);
  return {assembly.segment_start(idx), assembly.segment_end(idx)};
}

SegmentIntegrals integrate_segment(const LayerAssembly& assembly, std::size_t idx) {
  const Member& m = assembly.at(idx);
  return assembly.field().integrate(m.phase, m.division, assembly.segment_width(idx));
}

double coverage_quality(const LayerAssembly& assembly) {
  double h = 0.0;
  for (std::size_t i = 0; i < assembly.size(); ++i) h += integrate_segment(assembly, i).coverage;
  return h;
}

double agent_angular_velocity(const LayerAssembly& assembly, int id, double kappa_omega) {
  return kappa_omega * integrate_segment(assembly, assembly.index_of(id)).gradient;
}

double division_point_velocity(const LayerAssembly& assembly, int id, double kappa_s) {
  const std::size_t idx = assembly.index_of(id);
  const Member& m = assembly.at(idx);
  const Member& a = assembly.at(assembly.alpha(idx));
  const LayerField& field = assembly.field();
  return kappa_s * (field.distance(m.phase, m.division) - field.distance(a.phase, m.division));
}

double division_point_gradient(const LayerAssembly& assembly, int id) {
  const std::size_t idx = assembly.index_of(id);
  const Member& m = assembly.at(idx);
  const Member& a = assembly.at(assembly.alpha(idx));
  const LayerField& field = assembly.field();
  const SensingModel& f = field.sensing();
  return (f.detect_prob(field.distance(a.phase, m.division)) -
          f.detect_prob(field.distance(m.phase, m.division))) *
         field.density().density(m.division);
}

double radial_control(const LayerCurve& curve, Phase phi, double r, double kappa_r) {
  return kappa_r * (curve.radius(phi) - r);
}

LengthBounds check_length_bounds(const LayerAssembly& assembly) {
  LengthBounds b;
  if (assembly.empty()) return b;
  b.total = assembly.curve().total_length();
  const double tol = 1e-6 * b.total;
  const double n = static_cast<double>(assembly.size());
  b.min_length = b.total;
  for (std::size_t i = 0; i < assembly.size(); ++i) {
    b.min_length = std::min(b.min_length, assembly.segment_length(i));
    b.max_length = std::max(b.max_length, assembly.segment_length(i));
  }
  b.ok = b.min_length <= b.total / n + tol;
  if (assembly.size() >= 2) {
    b.ok = b.ok && b.max_length >= b.total / n - tol && b.max_length <= 0.5 * b.total + tol;
  }
  return b;
}

StepReport step_single_layer(LayerAssembly& assembly, const Gains& gains, double dt) {
  StepReport report;
  const std::size_t n = assembly.size();
  if (n == 0) return report;
  const LayerField& field = assembly.field();
  const LayerCurve& curve = field.curve();

  if (n == 1) {
    assembly.at(0).division = assembly.at(0).phase + kPi;
  } else if (gains.snap_midpoints) {
    assembly.set_midpoint_divisions();
  } else {
    const double tolerance = gains.epsilon * curve.total_length();
    std::vector<Phase> updated(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Phase phi = assembly.at(i).phase;
      const Phase phi_alpha = assembly.at(assembly.alpha(i)).phase;
      Phase s = assembly.at(i).division;
      int it = 0;
      for (; it < gains.inner_iterations; ++it) {
        const double imbalance = field.distance(phi, s) - field.distance(phi_alpha, s);
        if (std::abs(imbalance) <= tolerance) break;
        s = s + dt * gains.kappa_s * imbalance;
      }
      report.inner_iterations = std::max(report.inner_iterations, it);
      updated[i] = s;
    }
    for (std::size_t i = 0; i < n; ++i) assembly.at(i).division = updated[i];
  }

  report.segments.resize(n);
  report.ids.resize(n);
  std::vector<double> omega(n);
  for (std::size_t i = 0; i < n; ++i) {
    const SegmentIntegrals seg = integrate_segment(assembly, i);
    report.segments[i] = seg;
    report.ids[i] = assembly.at(i).id;
    report.coverage += seg.coverage;
    report.max_abs_gradient = std::max(report.max_abs_gradient, std::abs(seg.gradient));
    omega[i] = gains.kappa_omega * seg.gradient;
  }

  for (std::size_t i = 0; i < n; ++i) {
    Member& m = assembly.at(i);
    const double u_r = radial_control(curve, m.phase, m.radius, gains.kappa_r);
    const double r = m.radius + dt * u_r;
    const double phi = m.phase.value() + dt * omega[i];
    report.max_speed = std::max(report.max_speed, std::hypot(u_r, m.radius * omega[i]));
    m.radius = r;
    m.phase = phase_of(r * std::cos(phi), r * std::sin(phi));
  }
  if (n == 1) assembly.at(0).division = assembly.at(0).phase + kPi;

  assembly.validate();
  assembly.rotate_to_ascending();
  report.min_gap = assembly.min_gap();
  return report;
}

}  // namespace ringcover
