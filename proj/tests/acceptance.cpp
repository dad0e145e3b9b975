// Acceptance suite: one PASS/FAIL line per criterion. Tolerances and budgets are fixed here.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "twoaxis/config.hpp"
#include "twoaxis/oracle.hpp"
#include "twoaxis/pmp.hpp"
#include "twoaxis/rotations.hpp"
#include "twoaxis/solver.hpp"

using namespace twoaxis;

namespace {

constexpr double kPi = std::numbers::pi;

// Criterion 1
constexpr int kExampleGrid          = 32;
constexpr double kExampleTol        = 1e-8;
constexpr double kSwitchCostTol     = 1e-10;
constexpr double kExampleBudget     = 30;
// Criterion 2
constexpr int kFreeYTargets         = 20;
constexpr double kFreeYBudget       = 10;
constexpr double kStructureTol      = 1e-9;
// Criterion 3
constexpr int kSandwichTargets      = 50;
constexpr double kDescentSlack      = 1e-6;
constexpr double kGraphTol          = 0.05;
constexpr double kGraphDelta        = 0.01;
constexpr double kGraphQuant        = 0.02;
constexpr int kDescentSegments      = 4;
constexpr int kDescentRestarts      = 6;
constexpr double kSandwichBudget    = 600;
// Criterion 4
constexpr double kCertifyBudget     = 60;
// Criterion 5
constexpr double kFlipTol           = 1e-11;
constexpr double kConjTol           = 1e-10;
constexpr double kCoverTol          = 1e-10;
constexpr double kConservationTol   = 1e-10;
constexpr double kIdentityBudget    = 10;
// Criterion 6
constexpr double kCriticalTimeTol   = 1e-12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct PlannedCase
{
  AxisConfig cfg;
  Plan plan;
  std::string label;
};

std::vector<PlannedCase> g_planned;
int g_failures = 0;

void report(int id, bool pass, const std::string & what, const std::string & detail)
{
  std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  g_failures += pass ? 0 : 1;
}

std::string fmt(const char * f, auto... args)
{
  char buf[4096];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Quatd random_unit(std::mt19937_64 & rng)
{
  std::normal_distribution<double> n;
  Quatd q = make_quat(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q;
}

Quatd rot(const Vec3d & axis, double t)
{
  return quat_exp<double>((t / 2) * axis.normalized());
}

double example_cost(double t)
{
  const double c = std::cos(t / 2), s = std::sin(t / 2);
  return std::min(2 * (std::acos(1 / (c + s)) + std::acos(c - s)), kPi + t);
}

void criterion_example()
{
  const auto t0  = Clock::now();
  const auto cfg = make_config(kPi / 2, 1);
  const Vec3d z  = cfg.Z.normalized();
  double worst   = 0;
  std::vector<std::size_t> counts;
  std::vector<double> ts;
  for (int i = 0; i < kExampleGrid; ++i) {
    const double t = 0.1 + (kPi - 0.2) * i / (kExampleGrid - 1);
    const Plan p   = plan(cfg, rot(z, t));
    worst          = std::max(worst, std::abs(p.total_cost - example_cost(t)));
    counts.push_back(p.segments.size());
    ts.push_back(t);
    g_planned.push_back({cfg, p, fmt("example t=%.4f", t)});
  }
  // the four-factor family gives way to the three-factor Euler word
  int switches       = 0;
  double switch_left = 0, switch_right = 0;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] != counts[i - 1]) {
      ++switches;
      switch_left  = ts[i - 1];
      switch_right = ts[i];
    }
  }
  const double step      = (kPi - 0.2) / (kExampleGrid - 1);
  const bool switch_ok   = switches == 1 && counts.front() == 4 && counts.back() == 3 &&
                         switch_left >= kPi / 2 - step && switch_right <= kPi / 2 + step;
  const Plan mid         = plan(cfg, rot(z, kPi / 2));
  g_planned.push_back({cfg, mid, "example t=pi/2"});
  const double c = std::cos(kPi / 4), s = std::sin(kPi / 4);
  const double four      = 2 * (std::acos(1 / (c + s)) + std::acos(c - s));
  const double three     = kPi + kPi / 2;
  const double mid_err   = std::max({std::abs(mid.total_cost - 1.5 * kPi), std::abs(four - 1.5 * kPi),
                                     std::abs(three - 1.5 * kPi)});
  const double elapsed   = seconds_since(t0);
  const bool pass = worst <= kExampleTol && switch_ok && mid_err <= kSwitchCostTol && elapsed < kExampleBudget;
  report(1, pass, "rotation about Z at alpha=pi/2, kappa=1 follows the closed form",
         fmt("%d points, max |cost - closed form| = %.2e (tol %.0e); segment count 4->3 between t=%.4f and %.4f "
             "(%d change); cost at pi/2 within %.2e of 3pi/2 (tol %.0e); %.1f s (budget %.0f s)",
             kExampleGrid, worst, kExampleTol, switch_left, switch_right, switches, mid_err, kSwitchCostTol, elapsed,
             kExampleBudget));
}

void criterion_free_y()
{
  const auto t0  = Clock::now();
  const auto cfg = make_config(kPi / 2, 0);
  std::mt19937_64 rng(2002);
  int good = 0;
  std::string first_bad;
  for (int i = 0; i < kFreeYTargets; ++i) {
    const Quatd g = random_unit(rng);
    const Plan p  = plan(cfg, g);
    g_planned.push_back({cfg, p, fmt("free-Y target %d", i)});
    bool ok = p.pattern_id == "IX" || p.pattern_id == "X" || p.pattern_id == "empty";
    ok      = ok && p.residual < 1e-9;
    int x_segments = 0;
    double x_time  = 0;
    for (std::size_t k = 0; k < p.segments.size(); ++k) {
      const auto & s = p.segments[k];
      if (std::abs(s.control.a) < kStructureTol) {
        // Y factor: at most a half turn, and exactly a half turn between other factors
        const bool interior = k > 0 && k + 1 < p.segments.size();
        ok = ok && s.duration <= kPi + kStructureTol && (!interior || std::abs(s.duration - kPi) < kStructureTol);
      } else {
        // the one W+ segment, parallel to X when kappa = 0
        ++x_segments;
        ok = ok && cfg.vector(s.control).normalized().cross(cfg.X).norm() < kStructureTol;
        x_time += std::abs(s.control.a) * s.duration;
      }
    }
    ok = ok && x_segments <= 1 && std::abs(p.total_cost - x_time) < kStructureTol;
    good += ok;
    if (!ok && first_bad.empty()) { first_bad = fmt(", first bad: target %d pattern %s", i, p.pattern_id.c_str()); }
  }
  const double elapsed = seconds_since(t0);
  report(2, good == kFreeYTargets && elapsed < kFreeYBudget,
         "kappa=0 plans are subwords of pi-Y / single W+ words and pay only X time",
         fmt("%d/%d structural matches%s; %.1f s (budget %.0f s)", good, kFreeYTargets, first_bad.c_str(), elapsed,
             kFreeYBudget));
}

void criterion_sandwich()
{
  const auto t0 = Clock::now();
  const std::vector<std::pair<double, double>> cfgs{
    {kPi / 2, 1}, {kPi / 2, 0.5}, {std::acos(0.25), 0.5}, {std::acos(0.5), 0.25}, {kPi / 2, 0}};
  std::mt19937_64 rng(3003);
  int descent_ok = 0, graph_ok = 0, graph_errors = 0;
  double worst_descent = -1e300, worst_graph = 0;
  std::string graph_failures;
  for (int i = 0; i < kSandwichTargets; ++i) {
    const auto [alpha, kappa] = cfgs[static_cast<std::size_t>(i) % cfgs.size()];
    const auto cfg            = make_config(alpha, kappa);
    const Quatd g             = random_unit(rng);
    const Plan p              = plan(cfg, g);
    g_planned.push_back({cfg, p, fmt("sandwich target %d", i)});

    const auto wd    = word_descent(cfg, g, kDescentSegments, kDescentRestarts);
    const double gap = p.total_cost - wd.cost_upper;
    worst_descent    = std::max(worst_descent, gap);
    descent_ok += gap <= kDescentSlack;

    try {
      const auto gs     = graph_search(cfg, g, kGraphDelta, kGraphQuant);
      const double diff = std::abs(p.total_cost - gs.cost_upper);
      worst_graph       = std::max(worst_graph, diff);
      if (diff <= kGraphTol) {
        ++graph_ok;
      } else {
        graph_failures += fmt(" #%d(%.3f)", i, diff);
      }
    } catch (const std::exception & e) {
      ++graph_errors;
      graph_failures += fmt(" #%d(%s)", i, e.what());
    }
  }
  const double elapsed = seconds_since(t0);
  const bool pass = descent_ok == kSandwichTargets && graph_ok == kSandwichTargets && elapsed < kSandwichBudget;
  report(3, pass, "planner is bracketed by the catalog-free oracles on 5 configurations",
         fmt("planner <= word_descent + %.0e on %d/%d (max planner - descent = %.2e); |planner - graph_search| <= %.2f "
             "on %d/%d (max finite diff %.3f, %d searches without a result; misses:%s); %.0f s (budget %.0f s)",
             kDescentSlack, descent_ok, kSandwichTargets, worst_descent, kGraphTol, graph_ok, kSandwichTargets,
             worst_graph, graph_errors, graph_failures.empty() ? " none" : graph_failures.c_str(), elapsed,
             kSandwichBudget));
}

/// Plans that violate the extremal structure; each must be rejected.
std::vector<PlannedCase> corrupted_suite()
{
  std::vector<PlannedCase> out;
  auto seg = [](const AxisConfig & cfg, ControlTag t, double d) { return Segment{cfg.control(t), d}; };
  auto add = [&](const AxisConfig & cfg, std::vector<Segment> segs, const std::string & label) {
    Plan p;
    p.segments   = std::move(segs);
    p.total_cost = segments_cost(cfg, p.segments);
    out.push_back({cfg, p, label});
  };

  const auto unit = make_config(kPi / 2, 1);
  const auto mgt  = make_config(std::acos(0.25), 0.5);
  const auto mlt  = make_config(std::acos(0.5), 0.25);
  const auto mid  = make_config(1.1, 0.6);

  add(unit, {seg(unit, ControlTag::PlusX, kPi), seg(unit, ControlTag::PlusX, kPi)}, "R(pi X) R(pi X)");
  add(mgt, {seg(mgt, ControlTag::PlusX, 3.5)}, "single X arc longer than pi");
  add(mgt, {{mgt.classify(0.3, 0.7), 0.6}}, "mixed control that is not critical");
  add(mlt, {seg(mlt, ControlTag::PlusY, 0.5), seg(mlt, ControlTag::PlusWm, 0.4), seg(mlt, ControlTag::PlusY, 0.5)},
      "W- dwell with kappa < c");
  add(mid, {seg(mid, ControlTag::PlusX, 0.6), seg(mid, ControlTag::MinusX, 0.4)}, "X then -X");
  add(mid, {seg(mid, ControlTag::PlusY, 0.6), seg(mid, ControlTag::MinusY, 0.4)}, "Y then -Y");

  // interior duration perturbations of genuine four- and five-factor words
  {
    const double tx = *mgt.t_hat_x, ty = mgt.t_hat_y;
    add(mgt,
        {seg(mgt, ControlTag::PlusY, ty), seg(mgt, ControlTag::PlusX, tx + 0.1), seg(mgt, ControlTag::PlusWp, 0.8),
         seg(mgt, ControlTag::PlusX, tx), seg(mgt, ControlTag::PlusY, ty)},
        "five-factor word with an interior critical time + 0.1");
  }
  {
    const double ty = 1.4, tx = tied_x_from_y(mid.kappa, ty);
    add(mid,
        {seg(mid, ControlTag::PlusX, 0.5), seg(mid, ControlTag::PlusY, ty + 0.1), seg(mid, ControlTag::MinusX, tx),
         seg(mid, ControlTag::MinusY, 0.3)},
        "four-factor word with the tangent relation broken by 0.1");
  }
  {
    const double ty = 1.4, tx = tied_x_from_y(mid.kappa, ty);
    add(mid,
        {seg(mid, ControlTag::PlusX, 0.5), seg(mid, ControlTag::PlusY, ty), seg(mid, ControlTag::PlusX, tx),
         seg(mid, ControlTag::MinusY, 0.3)},
        "four-factor word with one sign flipped");
  }
  {
    const auto free_y = make_config(kPi / 2, 0);
    add(free_y,
        {seg(free_y, ControlTag::PlusY, 1.0), seg(free_y, ControlTag::PlusWp, 0.7), seg(free_y, ControlTag::PlusY, 2.0),
         seg(free_y, ControlTag::PlusWp, 0.4)},
        "kappa=0 word with an interior Y turn short of pi");
  }
  return out;
}

void criterion_certify()
{
  const auto t0 = Clock::now();
  int planned_ok = 0;
  std::string first_bad;
  for (const auto & c : g_planned) {
    const auto rep = check_plan(c.cfg, c.plan);
    planned_ok += rep.pass;
    if (!rep.pass && first_bad.empty()) { first_bad = fmt(", first rejected: %s: %s", c.label.c_str(), rep.reason.c_str()); }
  }
  const auto bad   = corrupted_suite();
  int rejected     = 0;
  std::string leak;
  for (const auto & c : bad) {
    const auto rep = check_plan(c.cfg, c.plan);
    rejected += !rep.pass;
    if (rep.pass) { leak += " [" + c.label + "]"; }
  }
  const double elapsed = seconds_since(t0);
  const bool pass      = planned_ok == static_cast<int>(g_planned.size()) && !g_planned.empty() &&
                    rejected == static_cast<int>(bad.size()) && bad.size() == 10 && elapsed < kCertifyBudget;
  report(4, pass, "every planner plan satisfies the maximum principle and corrupted plans do not",
         fmt("%d/%zu planner plans certified%s; %d/%zu corrupted plans rejected%s; %.1f s (budget %.0f s)", planned_ok,
             g_planned.size(), first_bad.c_str(), rejected, bad.size(), leak.c_str(), elapsed, kCertifyBudget));
}

void criterion_identities()
{
  const auto t0 = Clock::now();
  std::mt19937_64 rng(5005);
  std::uniform_real_distribution<double> ua(0.01, kPi / 2), uk(0.01, 1), us(-kPi, kPi), ut(0, 4), u1(-1, 1);

  double flip = 0;
  for (int i = 0; i < 1000; ++i) {
    const double alpha = ua(rng), s1 = us(rng), s2 = us(rng), s3 = us(rng);
    const Vec3d X(1, 0, 0), Y(std::cos(alpha), std::sin(alpha), 0);
    const auto f    = flip_word(s1, s2, s3, X, Y);
    const Quatd lhs = quat_mul(quat_mul(quat_exp<double>(s1 * X), quat_exp<double>(s2 * Y)), quat_exp<double>(s3 * X));
    const Quatd rhs =
      quat_mul(quat_mul(quat_exp<double>(f.s1 * X), quat_exp<double>(-s2 * Y)), quat_exp<double>(f.s3 * X));
    flip = std::max(flip, (lhs.coeffs() - rhs.coeffs()).norm());
  }

  double conj = 0;
  for (int i = 0; i < 200; ++i) {
    const auto cfg  = make_config(ua(rng), uk(rng));
    const double t  = ut(rng);
    const Control w = cfg.control(ControlTag::PlusWp);
    const Quatd ax  = segment_rotation(cfg, cfg.control(ControlTag::PlusX), *cfg.t_hat_x);
    const Quatd ay  = segment_rotation(cfg, cfg.control(ControlTag::PlusY), cfg.t_hat_y);
    conj            = std::max(conj, std::abs(quat_mul(ax, ay).w()));
    conj            = std::max(conj, std::abs(quat_mul(ay, ax).w()));
    const Quatd lhs = quat_mul(quat_mul(ay, ax), segment_rotation(cfg, w, t));
    const Quatd rhs = quat_mul(segment_rotation(cfg, w, -t), quat_mul(ay, ax));
    conj            = std::max(conj, quat_distance(lhs, rhs));

    const auto free_y = make_config(cfg.alpha, 0);
    const Control w0  = free_y.control(ControlTag::PlusWp);
    const Quatd py    = segment_rotation(free_y, free_y.control(ControlTag::PlusY), kPi);
    conj = std::max(conj, quat_distance(quat_mul(py, segment_rotation(free_y, w0, t)),
                                        quat_mul(segment_rotation(free_y, w0, -t), py)));
  }

  double cover = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3d v(2 * u1(rng), 2 * u1(rng), 2 * u1(rng));
    cover = std::max(cover, (su2_to_so3(quat_exp(v)) - rot_axis_angle(2 * v.norm(), Vec3d(v.normalized()))).cwiseAbs().maxCoeff());
    const Vec3d x  = v.normalized();
    const double t = us(rng);
    const Mat3d r  = std::cos(t) * Mat3d::Identity() + std::sin(t) * ad_matrix(x) + (1 - std::cos(t)) * x * x.transpose();
    cover          = std::max(cover, (rot_axis_angle(t, x) - r).cwiseAbs().maxCoeff());
  }

  double conservation = 0;
  std::uniform_int_distribution<int> pick(0, 7);
  for (int i = 0; i < 1000; ++i) {
    const auto cfg = make_config(ua(rng), uk(rng));
    const double sgn = u1(rng) < 0 ? -1 : 1;
    const AdjointState st =
      u1(rng) < 0 ? AdjointState{sgn, cfg.kappa * u1(rng), 3 * u1(rng)} : AdjointState{u1(rng), sgn * cfg.kappa, 3 * u1(rng)};
    const auto after = adjoint_flow_unchecked(st, cfg.control(static_cast<ControlTag>(pick(rng))), ut(rng), cfg);
    conservation     = std::max(conservation, std::abs(adjoint_norm_squared(cfg, after) - adjoint_norm_squared(cfg, st)));
  }
  const double elapsed = seconds_since(t0);
  const bool pass = flip < kFlipTol && conj < kConjTol && cover < kCoverTol && conservation < kConservationTol &&
                    elapsed < kIdentityBudget;
  report(5, pass, "quaternion identities and costate conservation",
         fmt("flip %.1e (tol %.0e, 1000 tuples); half-turn conjugations %.1e (tol %.0e, 200 configs); double cover "
             "and expanded rotation %.1e (tol %.0e, 1000 samples); |p|^2 drift %.1e (tol %.0e, 1000 flows); %.2f s "
             "(budget %.0f s)",
             flip, kFlipTol, conj, kConjTol, cover, kCoverTol, conservation, kConservationTol, elapsed, kIdentityBudget));
}

void criterion_critical_times()
{
  std::mt19937_64 rng(6006);
  std::uniform_real_distribution<double> ua(0.01, kPi / 2), uk(0, 1);
  double worst = 0;
  int n        = 0;
  while (n < 100) {
    const auto cfg = make_config(ua(rng), uk(rng));
    if (!(cfg.kappa + cfg.c > 0)) { continue; }
    const auto [tx, ty] = switch_time_relation(cfg, partner_z(cfg, 0), 0);
    worst = std::max({worst, std::abs(tx - *cfg.t_hat_x), std::abs(ty - cfg.t_hat_y)});
    ++n;
  }
  report(6, worst <= kCriticalTimeTol, "corner-to-corner arc times equal the critical times",
         fmt("max error %.1e over %d configurations (tol %.0e)", worst, n, kCriticalTimeTol));
}

}  // namespace

int main()
{
  criterion_example();
  criterion_free_y();
  criterion_sandwich();
  criterion_certify();
  criterion_identities();
  criterion_critical_times();
  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
