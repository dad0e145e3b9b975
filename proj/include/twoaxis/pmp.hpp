#ifndef TWOAXIS__PMP_HPP_
#define TWOAXIS__PMP_HPP_

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "solver.hpp"

namespace twoaxis {

/**
 * @brief Costate p = sS + qQ + zZ in the dual basis of the canonical frame.
 *
 * With the multiplier normalization p0 = -sin^2(alpha) the Hamiltonian of a
 * control u = aX + bY is sin^2(alpha) (sa + qb - |a| - kappa|b|).
 */
struct AdjointState
{
  double s{0};
  double q{0};
  double z{0};
};

Vec3d to_vector(const AxisConfig & cfg, const AdjointState & st);
AdjointState from_vector(const AxisConfig & cfg, const Vec3d & p);

/// |p|^2 = sin^2(alpha) (s^2 + q^2 + z^2 - 2 c s q).
double adjoint_norm_squared(const AxisConfig & cfg, const AdjointState & st);

/// H(p, u) / sin^2(alpha).
double hamiltonian(const AxisConfig & cfg, const AdjointState & st, const Control & u);

/**
 * @brief Controls that maximize the Hamiltonian at st.
 *
 * Interior of a face gives its single pure control. A corner gives both face
 * controls, plus the critical W control of that corner when |z| <= tol (W- only
 * for kappa >= c). For kappa = 0 the q = 0 face allows both +Y and -Y. Throws
 * std::invalid_argument("costate violates ℳ(p) = 0") off the admissible boundary.
 */
std::vector<ControlTag> region_control(const AdjointState & st, const AxisConfig & cfg, double tol = 1e-9);

/**
 * @brief Adjoint evolution dp/dt = p x u over parameter time t.
 *
 * Under a pure X control (q, z) turns about (s c, 0) with s frozen; under a pure
 * Y control (s, z) turns about (q c, 0) with q frozen; a critical W control keeps
 * the corner state fixed. Throws std::invalid_argument("control/region mismatch")
 * if u is not allowed at st.
 */
AdjointState adjoint_flow(const AdjointState & st, const Control & u, double t, const AxisConfig & cfg);

/// Same evolution without the region check; also valid for general controls.
AdjointState adjoint_flow_unchecked(const AdjointState & st, const Control & u, double t, const AxisConfig & cfg);

struct SwitchEvent
{
  double time{0};
  Control from_control;
  Control to_control;
  AdjointState costate_at_switch;
};

struct CheckOptions
{
  int scan_points{2001};
  double pass_violation{1e-6};
  double conservation_tolerance{1e-9};
  /// Segments shorter than this physical angle are ignored.
  double min_angle{1e-9};
};

struct CheckReport
{
  bool pass{false};
  std::string reason;
  int segment{-1};  ///< index into the original segment list for failures, else -1
  double violation{0};
  std::optional<AdjointState> initial_costate;
  std::vector<SwitchEvent> switches;
};

/**
 * @brief Searches for an initial costate that makes segments an extremal.
 *
 * The costate is pinned at the first switch whose corner is determined by the
 * two adjacent controls; the free z there is scanned and refined. Without such a
 * switch the midpoint of the first arc is used. Consecutive equal controls are
 * merged, and a merged single-control arc turning more than pi fails outright
 * since the opposite control reaches the same rotation more cheaply.
 */
CheckReport check_plan(const AxisConfig & cfg, std::span<const Segment> segments, const CheckOptions & opts = {});

CheckReport check_plan(const AxisConfig & cfg, const Plan & plan, const CheckOptions & opts = {});

/**
 * @brief Evolution times of the X and Y arcs joining critical points.
 *
 * tan^2(t_X/2) = ((z2-z1)^2 + 4 kappa^2) / ((z2+z1)^2 + 4 c^2) and
 * tan^2(t_Y/2) = ((z2-z1)^2 + 4) / ((z2+z1)^2 + 4 kappa^2 c^2), valid when
 * z1^2 + (kappa-c)^2 = z2^2 + (kappa+c)^2. Throws
 * std::invalid_argument("not on a common trajectory") if that fails by more than 1e-9.
 */
std::pair<double, double> switch_time_relation(const AxisConfig & cfg, double z1, double z2);

/// z1 >= 0 on the common trajectory through z2.
double partner_z(const AxisConfig & cfg, double z2);

}  // namespace twoaxis

#endif  // TWOAXIS__PMP_HPP_
