#include "twoaxis/patterns.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace twoaxis {

std::string_view to_string(PatternId id)
{
  static constexpr std::array<std::string_view, 10> names{"I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X"};
  return names[static_cast<std::size_t>(id)];
}

std::string_view to_string(Orbit o)
{
  switch (o) {
  case Orbit::FullD4: return "{±X,±Y}";
  case Orbit::HalfMirror: return "(±X,±Y)";
  case Orbit::HalfSwap: return "{-X,-Y}";
  case Orbit::NegOnly: return "(-X,-Y)";
  }
  return "?";
}

namespace {

struct SignedPair
{
  int a;
  int b;
};

SignedPair to_pair(ControlTag t)
{
  switch (t) {
  case ControlTag::PlusX: return {1, 0};
  case ControlTag::MinusX: return {-1, 0};
  case ControlTag::PlusY: return {0, 1};
  case ControlTag::MinusY: return {0, -1};
  case ControlTag::PlusWp: return {1, -1};
  case ControlTag::MinusWp: return {-1, 1};
  case ControlTag::PlusWm: return {1, 1};
  case ControlTag::MinusWm: return {-1, -1};
  case ControlTag::General: break;
  }
  throw std::invalid_argument("symmetry action undefined for a general control");
}

ControlTag from_pair(SignedPair p)
{
  if (p.a == 1 && p.b == 0) { return ControlTag::PlusX; }
  if (p.a == -1 && p.b == 0) { return ControlTag::MinusX; }
  if (p.a == 0 && p.b == 1) { return ControlTag::PlusY; }
  if (p.a == 0 && p.b == -1) { return ControlTag::MinusY; }
  if (p.a == 1 && p.b == -1) { return ControlTag::PlusWp; }
  if (p.a == -1 && p.b == 1) { return ControlTag::MinusWp; }
  if (p.a == 1 && p.b == 1) { return ControlTag::PlusWm; }
  return ControlTag::MinusWm;
}

SignedPair act(int index, SignedPair p)
{
  if (index & 4) { std::swap(p.a, p.b); }
  if (index & 1) { p.a = -p.a; }
  if (index & 2) { p.b = -p.b; }
  return p;
}

}  // namespace

ControlTag SymmetryElement::apply(ControlTag t) const { return from_pair(act(index, to_pair(t))); }

SymmetryElement SymmetryElement::compose(SymmetryElement h) const
{
  // Identify the composite by its images of the two basis directions.
  const SignedPair ex = act(index, act(h.index, {1, 0}));
  const SignedPair ey = act(index, act(h.index, {0, 1}));
  for (int i = 0; i < 8; ++i) {
    const SignedPair fx = act(i, {1, 0});
    const SignedPair fy = act(i, {0, 1});
    if (fx.a == ex.a && fx.b == ex.b && fy.a == ey.a && fy.b == ey.b) { return {i}; }
  }
  throw std::logic_error("dihedral composition escaped the group");
}

std::vector<SymmetryElement> orbit_elements(Orbit o)
{
  switch (o) {
  case Orbit::FullD4: return {{0}, {1}, {2}, {3}, {4}, {5}, {6}, {7}};
  case Orbit::HalfMirror: return {{0}, {1}, {2}, {3}};
  case Orbit::HalfSwap: return {{0}, {3}, {4}, {7}};
  case Orbit::NegOnly: return {{0}, {3}};
  }
  return {{0}};
}

double w_cap(const AxisConfig & cfg, ControlTag w) { return std::numbers::pi / cfg.vector(cfg.control(w)).norm(); }

PatternConstants PatternConstants::from(const AxisConfig & cfg)
{
  return {cfg.t_hat_x.value_or(0.0),
    cfg.t_hat_y,
    w_cap(cfg, ControlTag::PlusWp),
    w_cap(cfg, ControlTag::PlusWm)};
}

namespace {

double resolve(DurationSource src, ControlTag role, const PatternConstants & k)
{
  const char axis = axis_letter(role);
  const double hat = axis == 'X' ? k.t_hat_x : k.t_hat_y;
  switch (src) {
  case DurationSource::Pi:
  case DurationSource::TiedOwnAxis: return std::numbers::pi;
  case DurationSource::HatOwnAxis: return hat;
  case DurationSource::TwoHatOwnAxis: return 2 * hat;
  case DurationSource::WCap:
    return (role == ControlTag::PlusWp || role == ControlTag::MinusWp) ? k.w_plus_cap : k.w_minus_cap;
  }
  return 0;
}

std::string tied_symbol(ControlTag role) { return axis_letter(role) == 'X' ? "t_X" : "t_Y"; }

/// Re-resolves value and symbol of a slot after its role changed.
void refresh(Slot & s, const PatternConstants & k)
{
  auto & d = s.duration;
  d.upper  = resolve(d.source, s.role, k);
  if (d.kind == DurationKind::Tied) { d.symbol = tied_symbol(s.role); }
}

Slot fixed(ControlTag role, DurationSource src)
{
  return {role, {DurationKind::Fixed, src, "", 0, 0}};
}

Slot free_slot(ControlTag role, DurationSource src, std::string sym)
{
  return {role, {DurationKind::Free, src, std::move(sym), 0, 0}};
}

Slot tied(ControlTag role) { return {role, {DurationKind::Tied, DurationSource::TiedOwnAxis, "", 0, 0}}; }

std::string format_duration(const Slot & s)
{
  const auto & d = s.duration;
  const char axis = axis_letter(s.role);
  switch (d.kind) {
  case DurationKind::Fixed:
    if (d.source == DurationSource::Pi) { return "π"; }
    return axis == 'X' ? "t̂_X" : "t̂_Y";
  case DurationKind::Free:
  case DurationKind::Tied: return d.symbol;
  }
  return "?";
}

std::string format_factor(const Slot & s)
{
  std::string role{to_string(s.role)};
  std::string dur = format_duration(s);
  if (role.front() == '-') { return "R(-" + dur + " " + role.substr(1) + ")"; }
  return "R(" + dur + " " + role + ")";
}

std::string format_word(const std::vector<Slot> & slots)
{
  std::string out;
  for (const auto & s : slots) {
    if (!out.empty()) { out += ' '; }
    out += format_factor(s);
  }
  return out;
}

}  // namespace

std::string Pattern::word() const { return format_word(slots); }

std::string Pattern::constraint() const
{
  if (tan_relation) { return "tan(t_X/2) = κ tan(t_Y/2), 0 < t_X, t_Y ≤ π"; }
  for (const auto & s : slots) {
    if (s.duration.kind != DurationKind::Free) { continue; }
    if (s.duration.source == DurationSource::TwoHatOwnAxis) {
      return axis_letter(s.role) == 'X' ? "0 ≤ t ≤ 2 t̂_X" : "0 ≤ t ≤ 2 t̂_Y";
    }
    if (s.duration.source == DurationSource::WCap) { return "t ≥ 0 (angle ≤ π)"; }
  }
  return "";
}

Pattern make_pattern(const AxisConfig & cfg, PatternId id, Orbit orbit)
{
  using C           = ControlTag;
  using D           = DurationSource;
  Pattern p;
  p.id        = id;
  p.orbit     = orbit;
  p.constants = PatternConstants::from(cfg);
  switch (id) {
  case PatternId::I:
    p.slots        = {tied(C::PlusX), tied(C::PlusY), tied(C::MinusX), tied(C::MinusY)};
    p.tan_relation = true;
    break;
  case PatternId::II: p.slots = {fixed(C::PlusX, D::Pi), free_slot(C::PlusWp, D::WCap, "t"), fixed(C::PlusX, D::Pi)}; break;
  case PatternId::III: p.slots = {fixed(C::PlusX, D::Pi), free_slot(C::PlusWp, D::WCap, "t"), fixed(C::MinusY, D::Pi)}; break;
  case PatternId::IV:
    p.slots = {fixed(C::PlusY, D::HatOwnAxis),
      fixed(C::PlusX, D::HatOwnAxis),
      free_slot(C::PlusWp, D::WCap, "t"),
      fixed(C::PlusX, D::HatOwnAxis),
      fixed(C::PlusY, D::HatOwnAxis)};
    break;
  case PatternId::V:
    p.slots = {fixed(C::PlusY, D::HatOwnAxis),
      fixed(C::PlusX, D::HatOwnAxis),
      free_slot(C::PlusWp, D::WCap, "t"),
      fixed(C::MinusY, D::HatOwnAxis),
      fixed(C::MinusX, D::HatOwnAxis)};
    break;
  case PatternId::VI: p.slots = {fixed(C::PlusY, D::Pi), free_slot(C::PlusWm, D::WCap, "t"), fixed(C::PlusY, D::Pi)}; break;
  case PatternId::VII: p.slots = {fixed(C::PlusX, D::Pi), free_slot(C::PlusWm, D::WCap, "t"), fixed(C::PlusY, D::Pi)}; break;
  case PatternId::VIII:
    p.slots = {fixed(C::PlusY, D::Pi), free_slot(C::PlusX, D::TwoHatOwnAxis, "t"), fixed(C::PlusY, D::Pi)};
    break;
  case PatternId::IX: p.slots = {fixed(C::PlusY, D::Pi), free_slot(C::PlusWp, D::WCap, "t"), fixed(C::PlusY, D::Pi)}; break;
  case PatternId::X: p.slots = {fixed(C::PlusY, D::Pi), free_slot(C::PlusWp, D::WCap, "t"), fixed(C::MinusY, D::Pi)}; break;
  }
  for (auto & s : p.slots) { refresh(s, p.constants); }
  return p;
}

std::vector<Pattern> catalog(const AxisConfig & cfg)
{
  using P = PatternId;
  using O = Orbit;
  std::vector<std::pair<P, O>> entries;
  switch (cfg.regime) {
  case Regime::KappaZero: entries = {{P::IX, O::HalfMirror}, {P::X, O::HalfMirror}}; break;
  case Regime::CZero: entries = {{P::I, O::FullD4}, {P::II, O::FullD4}, {P::III, O::FullD4}}; break;
  case Regime::CLessKappa:
    entries = {{P::I, O::FullD4}, {P::IV, O::HalfSwap}, {P::V, O::HalfSwap}, {P::VI, O::HalfSwap}, {P::VII, O::HalfSwap}};
    break;
  case Regime::KappaLessC: entries = {{P::I, O::FullD4}, {P::IV, O::HalfSwap}, {P::V, O::HalfSwap}, {P::VIII, O::NegOnly}}; break;
  case Regime::Bifurcation:
    entries = {{P::I, O::FullD4},
      {P::IV, O::HalfSwap},
      {P::V, O::HalfSwap},
      {P::VI, O::HalfSwap},
      {P::VII, O::HalfSwap},
      {P::VIII, O::NegOnly}};
    break;
  }
  std::vector<Pattern> out;
  out.reserve(entries.size());
  for (auto [id, orbit] : entries) { out.push_back(make_pattern(cfg, id, orbit)); }
  return out;
}

Pattern apply_symmetry(const Pattern & p, SymmetryElement g)
{
  bool allowed = false;
  for (auto e : orbit_elements(p.orbit)) { allowed = allowed || e == g; }
  if (!allowed) { throw std::invalid_argument("symmetry not applicable to pattern"); }
  Pattern out  = p;
  out.symmetry = g.compose(p.symmetry);
  for (auto & s : out.slots) {
    s.role = g.apply(s.role);
    refresh(s, out.constants);
  }
  return out;
}

double tied_x_from_y(double kappa, double t_y)
{
  return 2 * std::atan2(kappa * std::sin(t_y / 2), std::cos(t_y / 2));
}

double tied_y_from_x(double kappa, double t_x)
{
  return 2 * std::atan2(std::sin(t_x / 2), kappa * std::cos(t_x / 2));
}

std::string SubwordShape::word() const { return format_word(slots); }

std::vector<SubwordShape> enumerate_subwords(const Pattern & p, SymmetryElement g)
{
  const Pattern variant = apply_symmetry(p, g);
  const int n           = static_cast<int>(variant.slots.size());
  std::vector<SubwordShape> shapes;
  shapes.reserve(static_cast<std::size_t>(n * (n + 1) / 2));

  for (int k = 1; k <= n; ++k) {
    for (int m = k; m <= n; ++m) {
      SubwordShape sh;
      sh.pattern      = p.id;
      sh.symmetry     = variant.symmetry;
      sh.k            = k;
      sh.m            = m;
      sh.tan_relation = variant.tan_relation;
      sh.slots.assign(variant.slots.begin() + (k - 1), variant.slots.begin() + m);

      // The Tied pair is driven by an interior slot, preferring a Y slot.
      if (variant.tan_relation) {
        for (int i = 1; i + 1 < static_cast<int>(sh.slots.size()); ++i) {
          const auto & s = sh.slots[static_cast<std::size_t>(i)];
          if (s.duration.kind != DurationKind::Tied) { continue; }
          const char axis = axis_letter(s.role);
          if (axis == 'Y' || sh.pair_axis == 0) { sh.pair_axis = axis; }
        }
      }

      bool pair_listed = false;
      const int len    = static_cast<int>(sh.slots.size());
      for (int i = 0; i < len; ++i) {
        auto & s          = sh.slots[static_cast<std::size_t>(i)];
        auto & d          = s.duration;
        const bool is_end = (i == 0 || i == len - 1);
        if (is_end && d.kind != DurationKind::Free) {
          const bool was_tied = d.kind == DurationKind::Tied;
          d.kind              = DurationKind::Free;
          d.symbol            = "t" + std::to_string(k + i) + "'";
          FreeSymbol fs{d.symbol, 0, d.upper, was_tied && sh.pair_axis != 0, was_tied ? axis_letter(s.role) : char{0}};
          sh.free.push_back(fs);
        } else if (d.kind == DurationKind::Free) {
          sh.free.push_back({d.symbol, d.lower, d.upper, false, 0});
        } else if (d.kind == DurationKind::Tied && !pair_listed) {
          pair_listed = true;
          sh.free.push_back({sh.pair_axis == 'X' ? "t_X" : "t_Y", 0, std::numbers::pi, false, 0});
        }
      }
      shapes.push_back(std::move(sh));
    }
  }
  return shapes;
}

}  // namespace twoaxis
