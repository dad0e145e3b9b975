#ifndef TWOAXIS__CONFIG_HPP_
#define TWOAXIS__CONFIG_HPP_

#include <array>
#include <optional>
#include <string_view>

#include "rotations.hpp"

namespace twoaxis {

/// Parameter cell of (kappa, c = cos alpha); selects which pattern catalog applies.
enum class Regime { KappaZero, CZero, CLessKappa, KappaLessC, Bifurcation };

std::string_view to_string(Regime r);

/// Named controls of the extended control set; General is any other aX + bY.
enum class ControlTag { PlusX, MinusX, PlusY, MinusY, PlusWp, MinusWp, PlusWm, MinusWm, General };

std::string_view to_string(ControlTag t);

/// Sign of a named control (+1 or -1); General has none.
int control_sign(ControlTag t);

/// The named control with opposite sign.
ControlTag negate(ControlTag t);

/// Axis letter carried by a named control: 'X', 'Y', or 0 for the W controls.
char axis_letter(ControlTag t);

/// A generator u = aX + bY stored l1-normalized, |a| + |b| = 1.
struct Control
{
  double a{1};
  double b{0};
  ControlTag tag{ControlTag::PlusX};
};

/// Band on |kappa - c| inside which both bifurcation-side catalogs are merged.
inline constexpr double kBifurcationWidth = 1e-9;

/**
 * @brief A two-axis problem instance in the canonical frame.
 *
 * X = e1, Y = (c, sin alpha, 0), Z = X x Y. The dual basis S = X - cY, Q = Y - cX
 * and the critical controls W+ = S - kappa Q, W- = S + kappa Q are kept
 * unnormalized as 3-vectors; the corresponding l1-normalized controls come from
 * control().
 */
struct AxisConfig
{
  double alpha{};
  double kappa{};
  double c{};
  double sin_alpha{};

  Vec3d X, Y, Z;
  Vec3d S, Q;
  Vec3d Wplus, Wminus;

  /// Absent only when kappa = c = 0.
  std::optional<double> t_hat_x;
  double t_hat_y{};

  Regime regime{};

  /// The l1-normalized named control; throws for ControlTag::General.
  Control control(ControlTag tag) const;

  /// Euclidean generator aX + bY.
  Vec3d vector(const Control & u) const;

  /// Normalizes (a, b) and tags it with the matching named control, if any (tolerance 1e-12).
  Control classify(double a, double b) const;

  /// t_hat for a slot on the given axis letter ('X' or 'Y'); 0 when undefined.
  double t_hat(char axis) const;
};

/// Builds the instance for 0 < alpha <= pi/2, 0 <= kappa <= 1.
AxisConfig make_config(double alpha, double kappa);

/// |a| cost(X) + |b| cost(Y) with cost(X) = 1, cost(Y) = kappa.
double control_cost(const AxisConfig & cfg, const Control & u);

/// SU(2) lift of R(t(aX + bY)): quat_exp((t/2)(aX + bY)).
Quatd segment_rotation(const AxisConfig & cfg, const Control & u, double t);

}  // namespace twoaxis

#endif  // TWOAXIS__CONFIG_HPP_
