#include "twoaxis/pmp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace twoaxis {

namespace {

double sigma2(const AxisConfig & cfg) { return cfg.sin_alpha * cfg.sin_alpha; }

double sgn(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

bool is_pure_x(const Control & u) { return u.b == 0 && u.a != 0; }
bool is_pure_y(const Control & u) { return u.a == 0 && u.b != 0; }

/// Critical W for the corner (sign_s, sign_q), if that corner carries one.
std::optional<ControlTag> corner_w(const AxisConfig & cfg, double sign_s, double sign_q)
{
  if (sign_s > 0 && sign_q < 0) { return ControlTag::PlusWp; }
  if (sign_s < 0 && sign_q > 0) { return ControlTag::MinusWp; }
  if (cfg.kappa < cfg.c) { return std::nullopt; }
  return sign_s > 0 ? ControlTag::PlusWm : ControlTag::MinusWm;
}

bool is_w(ControlTag t)
{
  return t == ControlTag::PlusWp || t == ControlTag::MinusWp || t == ControlTag::PlusWm || t == ControlTag::MinusWm;
}

/// Corner signs (s, q) a critical control dwells at.
std::pair<double, double> w_corner(const AxisConfig & cfg, ControlTag t)
{
  const Control u = cfg.control(t);
  return {sgn(u.a), sgn(u.b)};
}

}  // namespace

Vec3d to_vector(const AxisConfig & cfg, const AdjointState & st) { return st.s * cfg.S + st.q * cfg.Q + st.z * cfg.Z; }

AdjointState from_vector(const AxisConfig & cfg, const Vec3d & p)
{
  const double k = sigma2(cfg);
  return {p.dot(cfg.X) / k, p.dot(cfg.Y) / k, p.dot(cfg.Z) / k};
}

double adjoint_norm_squared(const AxisConfig & cfg, const AdjointState & st)
{
  return sigma2(cfg) * (st.s * st.s + st.q * st.q + st.z * st.z - 2 * cfg.c * st.s * st.q);
}

double hamiltonian(const AxisConfig & cfg, const AdjointState & st, const Control & u)
{
  return st.s * u.a + st.q * u.b - std::abs(u.a) - cfg.kappa * std::abs(u.b);
}

std::vector<ControlTag> region_control(const AdjointState & st, const AxisConfig & cfg, double tol)
{
  const double k  = cfg.kappa;
  const double ds = std::abs(st.s) - 1;
  const double dq = std::abs(st.q) - k;
  if (std::max(ds, dq) > tol || std::max(ds, dq) < -tol) {
    throw std::invalid_argument("costate violates ℳ(p) = 0");
  }
  const bool on_x = std::abs(ds) <= tol;
  const bool on_y = std::abs(dq) <= tol;

  std::vector<ControlTag> out;
  if (on_x) { out.push_back(st.s > 0 ? ControlTag::PlusX : ControlTag::MinusX); }
  if (on_y) {
    if (k <= tol) {
      out.push_back(ControlTag::PlusY);
      out.push_back(ControlTag::MinusY);
    } else {
      out.push_back(st.q > 0 ? ControlTag::PlusY : ControlTag::MinusY);
    }
  }
  if (on_x && on_y && std::abs(st.z) <= tol) {
    const double sign_s = st.s > 0 ? 1 : -1;
    for (double sign_q : {1.0, -1.0}) {
      if (k > tol && sign_q != sgn(st.q)) { continue; }
      if (auto w = corner_w(cfg, sign_s, sign_q)) {
        if (std::find(out.begin(), out.end(), *w) == out.end()) { out.push_back(*w); }
      }
    }
  }
  return out;
}

AdjointState adjoint_flow_unchecked(const AdjointState & st, const Control & u, double t, const AxisConfig & cfg)
{
  const double c = cfg.c;
  if (is_pure_x(u)) {
    const double a  = u.a;
    const double x0 = st.q - st.s * c;
    const double ca = std::cos(a * t), sa = std::sin(a * t);
    return {st.s, st.s * c + x0 * ca + st.z * sa, st.z * ca - x0 * sa};
  }
  if (is_pure_y(u)) {
    const double b  = u.b;
    const double y0 = st.s - st.q * c;
    const double cb = std::cos(b * t), sb = std::sin(b * t);
    return {st.q * c + y0 * cb - st.z * sb, st.q, st.z * cb + y0 * sb};
  }
  // p(t) = R(-t u) p(0).
  const Vec3d p = rot_axis_angle<double>(-t, cfg.vector(u)) * to_vector(cfg, st);
  return from_vector(cfg, p);
}

AdjointState adjoint_flow(const AdjointState & st, const Control & u, double t, const AxisConfig & cfg)
{
  const auto allowed = region_control(st, cfg);
  if (u.tag == ControlTag::General || std::find(allowed.begin(), allowed.end(), u.tag) == allowed.end()) {
    throw std::invalid_argument("control/region mismatch");
  }
  if (is_w(u.tag)) { return st; }
  return adjoint_flow_unchecked(st, u, t, cfg);
}

namespace {

/// max and min of sin over the angle interval between lo and hi.
std::pair<double, double> sin_range(double from, double to)
{
  const double lo = std::min(from, to), hi = std::max(from, to);
  double mx       = std::max(std::sin(lo), std::sin(hi));
  double mn       = std::min(std::sin(lo), std::sin(hi));
  constexpr double two_pi = 2 * std::numbers::pi;
  if (std::floor((hi - std::numbers::pi / 2) / two_pi) != std::floor((lo - std::numbers::pi / 2) / two_pi)) { mx = 1; }
  if (std::floor((hi + std::numbers::pi / 2) / two_pi) != std::floor((lo + std::numbers::pi / 2) / two_pi)) { mn = -1; }
  return {mx, mn};
}

/// A merged constant-control arc.
struct Arc
{
  Control u;
  double t{0};
  int source{0};  ///< index of the first original segment
};

/// How far the arc starting at st leaves the region where u is optimal.
double arc_violation(const AxisConfig & cfg, const Arc & arc, const AdjointState & st)
{
  const double k = cfg.kappa, c = cfg.c;
  const Control & u = arc.u;
  if (is_pure_x(u)) {
    const double x0  = st.q - st.s * c;
    const double r   = std::hypot(x0, st.z);
    const double psi = std::atan2(x0, st.z);
    const auto [mx, mn] = sin_range(psi, psi + u.a * arc.t);
    const double qmax   = std::max(std::abs(st.s * c + r * mx), std::abs(st.s * c + r * mn));
    return std::max(std::abs(st.s - u.a), qmax - k);
  }
  if (is_pure_y(u)) {
    const double y0  = st.s - st.q * c;
    const double r   = std::hypot(y0, st.z);
    const double psi = std::atan2(y0, st.z);
    const auto [mx, mn] = sin_range(psi, psi - u.b * arc.t);
    const double smax   = std::max(std::abs(st.q * c + r * mx), std::abs(st.q * c + r * mn));
    return std::max(std::abs(st.q - k * u.b), smax - 1);
  }
  const auto [cs, cq] = w_corner(cfg, u.tag);
  const AdjointState end = adjoint_flow_unchecked(st, u, arc.t, cfg);
  double v = 0;
  for (const auto & e : {st, end}) {
    v = std::max({v, std::abs(e.s - cs), std::abs(e.q - k * cq), std::abs(e.z)});
  }
  return v;
}

struct Trajectory
{
  double violation{std::numeric_limits<double>::infinity()};
  int worst{-1};
  AdjointState initial;
};

/// Propagates from the state at the start of arc `anchor` (or at time `offset` into it).
Trajectory evaluate(const AxisConfig & cfg, const std::vector<Arc> & arcs, std::size_t anchor, double offset, AdjointState st)
{
  // Back to the start of arc 0.
  st = adjoint_flow_unchecked(st, arcs[anchor].u, -offset, cfg);
  for (std::size_t i = anchor; i-- > 0;) { st = adjoint_flow_unchecked(st, arcs[i].u, -arcs[i].t, cfg); }
  Trajectory tr;
  tr.initial    = st;
  tr.violation  = 0;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const double v = arc_violation(cfg, arcs[i], st);
    if (!(v <= tr.violation)) {
      tr.violation = v;
      tr.worst     = static_cast<int>(i);
    }
    st = adjoint_flow_unchecked(st, arcs[i].u, arcs[i].t, cfg);
  }
  if (std::isnan(tr.violation)) { tr.violation = std::numeric_limits<double>::infinity(); }
  return tr;
}

/// Scans a one-parameter family on [lo, hi] and refines the best local minima.
template<typename F>
Trajectory scan_family(F && family, double lo, double hi, int points)
{
  std::vector<double> xs(static_cast<std::size_t>(points));
  std::vector<Trajectory> trs(xs.size());
  for (int i = 0; i < points; ++i) {
    xs[static_cast<std::size_t>(i)]  = lo + (hi - lo) * (i + 1) / (points + 1);
    trs[static_cast<std::size_t>(i)] = family(xs[static_cast<std::size_t>(i)]);
  }
  std::vector<std::size_t> minima;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = trs[i].violation;
    if ((i == 0 || v <= trs[i - 1].violation) && (i + 1 == xs.size() || v <= trs[i + 1].violation)) { minima.push_back(i); }
  }
  std::sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) { return trs[a].violation < trs[b].violation; });
  if (minima.size() > 8) { minima.resize(8); }

  Trajectory best;
  for (std::size_t i : minima) {
    double a = i == 0 ? lo : xs[i - 1];
    double b = i + 1 == xs.size() ? hi : xs[i + 1];
    // Golden-section bracketing of the (piecewise smooth, locally unimodal) violation.
    const double g = (std::sqrt(5.0) - 1) / 2;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    Trajectory f1 = family(x1), f2 = family(x2);
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
      if (f1.violation <= f2.violation) {
        b  = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - g * (b - a);
        f1 = family(x1);
      } else {
        a  = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + g * (b - a);
        f2 = family(x2);
      }
    }
    for (const auto * t : {&trs[i], &f1, &f2}) {
      if (t->violation < best.violation) { best = *t; }
    }
  }
  return best;
}

}  // namespace

CheckReport check_plan(const AxisConfig & cfg, std::span<const Segment> segments, const CheckOptions & opts)
{
  CheckReport rep;

  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto & seg = segments[i];
    if (!(seg.duration >= 0)) {
      rep.reason  = "negative duration";
      rep.segment = static_cast<int>(i);
      return rep;
    }
    const Control u = cfg.classify(seg.control.a, seg.control.b);
    if (seg.duration * cfg.vector(u).norm() <= opts.min_angle) { continue; }
    if (u.tag == ControlTag::General) {
      rep.reason  = "control is neither a face control nor a critical control";
      rep.segment = static_cast<int>(i);
      return rep;
    }
    if (!arcs.empty() && arcs.back().u.tag == u.tag) {
      arcs.back().t += seg.duration;
    } else {
      arcs.push_back({cfg.control(u.tag), seg.duration, static_cast<int>(i)});
    }
  }
  for (const auto & arc : arcs) {
    if (arc.t * cfg.vector(arc.u).norm() > std::numbers::pi + opts.min_angle) {
      rep.reason  = "single-control arc turns more than pi";
      rep.segment = arc.source;
      return rep;
    }
    if ((arc.u.tag == ControlTag::PlusWm || arc.u.tag == ControlTag::MinusWm) && cfg.kappa < cfg.c) {
      rep.reason  = "W- dwell requires kappa >= c";
      rep.segment = arc.source;
      return rep;
    }
  }
  if (arcs.empty()) {
    rep.pass = true;
    return rep;
  }

  const double k = cfg.kappa;
  Trajectory best;
  bool anchored = false;
  for (std::size_t i = 0; i + 1 < arcs.size() && !anchored; ++i) {
    const Control & u = arcs[i].u;
    const Control & v = arcs[i + 1].u;
    double s = 0, q = 0;
    bool has_s = false, has_q = false, conflict = false;
    for (const Control * w : {&u, &v}) {
      if (w->a != 0) {
        conflict = conflict || (has_s && s != sgn(w->a));
        s        = sgn(w->a);
        has_s    = true;
      }
      if (w->b != 0) {
        conflict = conflict || (has_q && q != k * sgn(w->b) && k > 0);
        q        = k * sgn(w->b);
        has_q    = true;
      }
    }
    if (conflict) {
      rep.reason  = "adjacent controls need different costate regions";
      rep.segment = arcs[i + 1].source;
      return rep;
    }
    if (!(has_s && has_q)) { continue; }
    anchored = true;
    if (is_w(u.tag) || is_w(v.tag)) {
      best = evaluate(cfg, arcs, i + 1, 0, {s, q, 0});
    } else {
      auto family = [&](double theta) { return evaluate(cfg, arcs, i + 1, 0, {s, q, std::tan(theta)}); };
      best        = scan_family(family, -std::numbers::pi / 2, std::numbers::pi / 2, opts.scan_points);
    }
  }

  if (!anchored) {
    const Arc & a0 = arcs.front();
    const double half = a0.t / 2;
    if (arcs.size() > 1) {
      // kappa = 0 and only +-Y arcs: the zero costate maximizes every Y control.
      best = evaluate(cfg, arcs, 0, 0, {0, 0, 0});
    } else if (is_pure_x(a0.u)) {
      auto family = [&](double q) { return evaluate(cfg, arcs, 0, half, {a0.u.a, q, 0}); };
      best        = k > 0 ? scan_family(family, -k, k, opts.scan_points) : family(0.0);
    } else if (is_pure_y(a0.u)) {
      auto family = [&](double s) { return evaluate(cfg, arcs, 0, half, {s, k * a0.u.b, 0}); };
      best        = scan_family(family, -1, 1, opts.scan_points);
    } else {
      const auto [cs, cq] = w_corner(cfg, a0.u.tag);
      best                = evaluate(cfg, arcs, 0, half, {cs, k * cq, 0});
    }
  }

  rep.violation       = best.violation;
  rep.initial_costate = best.initial;
  if (!(best.violation <= opts.pass_violation)) {
    rep.reason  = "no admissible costate follows the switching structure";
    rep.segment = best.worst >= 0 ? arcs[static_cast<std::size_t>(best.worst)].source : -1;
    return rep;
  }

  // Switch table and conservation along the certified costate.
  AdjointState st     = best.initial;
  const double norm0  = adjoint_norm_squared(cfg, st);
  double time         = 0;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    st = adjoint_flow_unchecked(st, arcs[i].u, arcs[i].t, cfg);
    time += arcs[i].t;
    if (std::abs(adjoint_norm_squared(cfg, st) - norm0) > opts.conservation_tolerance * std::max(1.0, norm0)) {
      rep.reason  = "costate norm not conserved";
      rep.segment = arcs[i].source;
      return rep;
    }
    if (i + 1 < arcs.size()) { rep.switches.push_back({time, arcs[i].u, arcs[i + 1].u, st}); }
  }
  rep.pass = true;
  return rep;
}

CheckReport check_plan(const AxisConfig & cfg, const Plan & plan, const CheckOptions & opts)
{
  return check_plan(cfg, std::span<const Segment>(plan.segments), opts);
}

double partner_z(const AxisConfig & cfg, double z2)
{
  return std::sqrt(z2 * z2 + 4 * cfg.kappa * cfg.c);
}

std::pair<double, double> switch_time_relation(const AxisConfig & cfg, double z1, double z2)
{
  const double k = cfg.kappa, c = cfg.c;
  const double lhs = z1 * z1 + (k - c) * (k - c);
  const double rhs = z2 * z2 + (k + c) * (k + c);
  if (std::abs(lhs - rhs) > 1e-9 * std::max(1.0, std::abs(lhs))) {
    throw std::invalid_argument("not on a common trajectory");
  }
  const double d2 = (z2 - z1) * (z2 - z1);
  const double s2 = (z2 + z1) * (z2 + z1);
  const double tx = 2 * std::atan2(std::sqrt(d2 + 4 * k * k), std::sqrt(s2 + 4 * c * c));
  const double ty = 2 * std::atan2(std::sqrt(d2 + 4), std::sqrt(s2 + 4 * k * k * c * c));
  return {tx, ty};
}

}  // namespace twoaxis
