#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ringcover/field.hpp"

namespace ringcover {

/// One agent working on a layer.
struct Member {
  int id = 0;
  Phase phase;
  Phase division;  // s_i, the clockwise end of the agent's segment
  double radius = 0.0;
};

/// Raised when agents or division points leave their cyclic order.
class OrderingError : public std::runtime_error {
 public:
  OrderingError(int agent_id, const std::string& what)
      : std::runtime_error(what), agent_id_(agent_id) {}
  int agent_id() const noexcept { return agent_id_; }

 private:
  int agent_id_;
};

/// The agents of one layer, kept in counterclockwise phase order.
///
/// Index i's clockwise neighbour (alpha) is i - 1 and its counterclockwise
/// neighbour (beta) is i + 1, cyclically. Agent i owns the arc from its own
/// division point to beta's; a lone agent owns the whole layer.
class LayerAssembly {
 public:
  /// Sorts members by phase. Throws std::invalid_argument on repeated phases
  /// or ids. Division points are taken as given; see validate().
  LayerAssembly(const LayerField& field, std::vector<Member> members);

  const LayerField& field() const noexcept { return *field_; }
  const LayerCurve& curve() const noexcept { return field_->curve(); }

  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  const std::vector<Member>& members() const noexcept { return members_; }
  Member& at(std::size_t idx) { return members_.at(idx); }
  const Member& at(std::size_t idx) const { return members_.at(idx); }

  /// Throws std::out_of_range for unknown ids.
  std::size_t index_of(int id) const;

  std::size_t alpha(std::size_t idx) const noexcept {
    return idx == 0 ? members_.size() - 1 : idx - 1;
  }
  std::size_t beta(std::size_t idx) const noexcept {
    return idx + 1 == members_.size() ? 0 : idx + 1;
  }

  /// Start phase and angular width (in (0, 2pi]) of agent idx's segment.
  Phase segment_start(std::size_t idx) const { return members_[idx].division; }
  Phase segment_end(std::size_t idx) const { return members_[beta(idx)].division; }
  double segment_width(std::size_t idx) const;

  /// Arc length of agent idx's segment on the curve.
  double segment_length(std::size_t idx) const;

  /// Division points at the geodesic midpoints between clockwise neighbours.
  /// A lone agent gets the phase opposite its own.
  void set_midpoint_divisions();

  /// s_i = phi_i - delta(phi_i, phi_alpha) / 2 for every member.
  void reset_divisions_by_phase();

  /// Throws OrderingError unless every division point lies strictly between
  /// its agent and that agent's clockwise neighbour, and the agents wind
  /// around the origin exactly once.
  void validate() const;

  /// Smallest angular gap between any agent and either end of its segment.
  double min_gap() const;

  /// Restores ascending phase order by rotation only (after an agent
  /// crossed the zero phase). Call after validate().
  void rotate_to_ascending();

 private:
  const LayerField* field_;
  std::vector<Member> members_;
};

struct Gains {
  double kappa_r = 0.1;
  double kappa_omega = 0.01;
  double kappa_s = 0.05;
  /// Division-point balance tolerance, as a fraction of the layer length.
  double epsilon = 1e-4;
  int inner_iterations = 200;
  /// Jump division points straight to geodesic midpoints instead of running
  /// the division-point loop.
  bool snap_midpoints = false;
};

/// (s_i, s_beta) for member `id`. For a lone agent both ends coincide and the
/// segment is the whole layer.
std::pair<Phase, Phase> segment_of(const LayerAssembly& assembly, int id);

SegmentIntegrals integrate_segment(const LayerAssembly& assembly, std::size_t idx);

/// H: the summed coverage of every segment.
double coverage_quality(const LayerAssembly& assembly);

/// kappa_omega * dH/dphi_i.
double agent_angular_velocity(const LayerAssembly& assembly, int id, double kappa_omega);

/// kappa_s * (d(phi_i, s_i) - d(phi_alpha, s_i)).
double division_point_velocity(const LayerAssembly& assembly, int id, double kappa_s);

/// dH/ds_i = [f(d(phi_alpha, s_i)) - f(d(phi_i, s_i))] rho(s_i).
double division_point_gradient(const LayerAssembly& assembly, int id);

/// kappa_r * (R(phi) - r).
double radial_control(const LayerCurve& curve, Phase phi, double r, double kappa_r);

/// Segment lengths of a settled layer against min <= L/N and, for N >= 2,
/// L/N <= max <= L/2, tolerance 1e-6 L.
struct LengthBounds {
  double min_length = 0.0;
  double max_length = 0.0;
  double total = 0.0;
  bool ok = true;
};
LengthBounds check_length_bounds(const LayerAssembly& assembly);

struct StepReport {
  /// H evaluated after the division-point update, before agents move.
  double coverage = 0.0;
  double max_abs_gradient = 0.0;
  /// Largest Cartesian agent speed used in this step.
  double max_speed = 0.0;
  double min_gap = 0.0;
  int inner_iterations = 0;
  /// Per-member integrals, in the member order of the pre-step assembly.
  std::vector<SegmentIntegrals> segments;
  std::vector<int> ids;
};

/// One synchronous step of the single-layer controller: the division-point
/// loop against frozen agent phases, then one explicit Euler step of
/// (r, phi) with phi re-derived from the Cartesian position. Throws
/// OrderingError if the step breaks the cyclic order.
StepReport step_single_layer(LayerAssembly& assembly, const Gains& gains, double dt);

}  // namespace ringcover
