#include "twoaxis/config.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace twoaxis {

std::string_view to_string(Regime r)
{
  switch (r) {
  case Regime::KappaZero: return "KappaZero";
  case Regime::CZero: return "CZero";
  case Regime::CLessKappa: return "CLessKappa";
  case Regime::KappaLessC: return "KappaLessC";
  case Regime::Bifurcation: return "Bifurcation";
  }
  return "?";
}

std::string_view to_string(ControlTag t)
{
  switch (t) {
  case ControlTag::PlusX: return "X";
  case ControlTag::MinusX: return "-X";
  case ControlTag::PlusY: return "Y";
  case ControlTag::MinusY: return "-Y";
  case ControlTag::PlusWp: return "W+";
  case ControlTag::MinusWp: return "-W+";
  case ControlTag::PlusWm: return "W-";
  case ControlTag::MinusWm: return "-W-";
  case ControlTag::General: return "general";
  }
  return "?";
}

int control_sign(ControlTag t)
{
  switch (t) {
  case ControlTag::PlusX:
  case ControlTag::PlusY:
  case ControlTag::PlusWp:
  case ControlTag::PlusWm: return 1;
  case ControlTag::MinusX:
  case ControlTag::MinusY:
  case ControlTag::MinusWp:
  case ControlTag::MinusWm: return -1;
  case ControlTag::General: return 0;
  }
  return 0;
}

ControlTag negate(ControlTag t)
{
  switch (t) {
  case ControlTag::PlusX: return ControlTag::MinusX;
  case ControlTag::MinusX: return ControlTag::PlusX;
  case ControlTag::PlusY: return ControlTag::MinusY;
  case ControlTag::MinusY: return ControlTag::PlusY;
  case ControlTag::PlusWp: return ControlTag::MinusWp;
  case ControlTag::MinusWp: return ControlTag::PlusWp;
  case ControlTag::PlusWm: return ControlTag::MinusWm;
  case ControlTag::MinusWm: return ControlTag::PlusWm;
  case ControlTag::General: return ControlTag::General;
  }
  return ControlTag::General;
}

char axis_letter(ControlTag t)
{
  switch (t) {
  case ControlTag::PlusX:
  case ControlTag::MinusX: return 'X';
  case ControlTag::PlusY:
  case ControlTag::MinusY: return 'Y';
  default: return 0;
  }
}

namespace {

Control l1_normalized(double a, double b, ControlTag tag)
{
  const double n = std::abs(a) + std::abs(b);
  return {a / n, b / n, tag};
}

}  // namespace

Control AxisConfig::control(ControlTag tag) const
{
  switch (tag) {
  case ControlTag::PlusX: return {1, 0, tag};
  case ControlTag::MinusX: return {-1, 0, tag};
  case ControlTag::PlusY: return {0, 1, tag};
  case ControlTag::MinusY: return {0, -1, tag};
  case ControlTag::PlusWp: return l1_normalized(1 + kappa * c, -(kappa + c), tag);
  case ControlTag::MinusWp: return l1_normalized(-(1 + kappa * c), kappa + c, tag);
  case ControlTag::PlusWm: return l1_normalized(1 - kappa * c, kappa - c, tag);
  case ControlTag::MinusWm: return l1_normalized(-(1 - kappa * c), -(kappa - c), tag);
  case ControlTag::General: break;
  }
  throw std::invalid_argument("general control has no canonical coefficients");
}

Vec3d AxisConfig::vector(const Control & u) const { return u.a * X + u.b * Y; }

Control AxisConfig::classify(double a, double b) const
{
  const double n = std::abs(a) + std::abs(b);
  if (!(n > 0)) { throw std::invalid_argument("zero control"); }
  Control u{a / n, b / n, ControlTag::General};
  for (ControlTag tag :
    {ControlTag::PlusX,
      ControlTag::MinusX,
      ControlTag::PlusY,
      ControlTag::MinusY,
      ControlTag::PlusWp,
      ControlTag::MinusWp,
      ControlTag::PlusWm,
      ControlTag::MinusWm}) {
    const Control ref = control(tag);
    if (std::abs(ref.a - u.a) <= 1e-12 && std::abs(ref.b - u.b) <= 1e-12) {
      u.tag = tag;
      break;
    }
  }
  return u;
}

double AxisConfig::t_hat(char axis) const
{
  if (axis == 'X') { return t_hat_x.value_or(0.0); }
  if (axis == 'Y') { return t_hat_y; }
  return 0.0;
}

AxisConfig make_config(double alpha, double kappa)
{
  constexpr double half_pi = std::numbers::pi / 2;
  if (!(alpha > 0) || alpha > half_pi + 1e-12) { throw std::invalid_argument("axis angle out of range"); }
  if (!(kappa >= 0) || kappa > 1) { throw std::invalid_argument("cost ratio out of range"); }

  AxisConfig cfg;
  cfg.kappa = kappa;
  if (std::abs(alpha - half_pi) <= 1e-12) {
    cfg.alpha     = half_pi;
    cfg.c         = 0;
    cfg.sin_alpha = 1;
  } else {
    cfg.alpha     = alpha;
    cfg.c         = std::cos(alpha);
    cfg.sin_alpha = std::sin(alpha);
  }
  const double c = cfg.c;

  cfg.X = Vec3d::UnitX();
  cfg.Y = Vec3d(c, cfg.sin_alpha, 0);
  cfg.Z = cfg.X.cross(cfg.Y);
  cfg.S = cfg.X - c * cfg.Y;
  cfg.Q = cfg.Y - c * cfg.X;

  cfg.Wplus  = (1 + kappa * c) * cfg.X - (kappa + c) * cfg.Y;
  cfg.Wminus = (1 - kappa * c) * cfg.X + (kappa - c) * cfg.Y;

  // arccos((c - k)/(c + k)) and arccos(-(1 - kc)/(1 + kc)) in half-angle form,
  // which stays accurate when the arccos argument is close to +-1.
  if (kappa + c > 0) { cfg.t_hat_x = 2 * std::atan2(std::sqrt(kappa), std::sqrt(c)); }
  cfg.t_hat_y = 2 * std::atan2(1.0, std::sqrt(kappa * c));

  if (kappa == 0) {
    cfg.regime = Regime::KappaZero;
  } else if (c == 0) {
    cfg.regime = Regime::CZero;
  } else if (std::abs(kappa - c) <= kBifurcationWidth) {
    cfg.regime = Regime::Bifurcation;
  } else if (c < kappa) {
    cfg.regime = Regime::CLessKappa;
  } else {
    cfg.regime = Regime::KappaLessC;
  }
  return cfg;
}

double control_cost(const AxisConfig & cfg, const Control & u) { return std::abs(u.a) + cfg.kappa * std::abs(u.b); }

Quatd segment_rotation(const AxisConfig & cfg, const Control & u, double t)
{
  return quat_exp<double>((t / 2) * cfg.vector(u));
}

}  // namespace twoaxis
