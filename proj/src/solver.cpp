#include "twoaxis/solver.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

namespace twoaxis {

Quatd segments_quat(const AxisConfig & cfg, std::span<const Segment> segments)
{
  std::vector<Quatd> factors;
  factors.reserve(segments.size());
  for (const auto & s : segments) { factors.push_back(segment_rotation(cfg, s.control, s.duration)); }
  return quat_product<double>(factors);
}

double segments_cost(const AxisConfig & cfg, std::span<const Segment> segments)
{
  double cost = 0;
  for (const auto & s : segments) { cost += s.duration * control_cost(cfg, s.control); }
  return cost;
}

std::string_view to_string(ShapeOutcome o)
{
  switch (o) {
  case ShapeOutcome::Solved: return "solved";
  case ShapeOutcome::Infeasible: return "infeasible";
  case ShapeOutcome::Degenerate: return "degenerate";
  case ShapeOutcome::Pruned: return "pruned";
  }
  return "?";
}

namespace {

constexpr double kBoundSlack = 1e-12;

/// How each slot of a shape gets its duration from the free parameters.
struct Layout
{
  enum class Kind { Fixed, Param, Pair };
  struct Entry
  {
    Kind kind{Kind::Fixed};
    double value{0};
    int index{-1};
    char axis{0};
  };

  std::vector<Entry> slots;
  std::vector<Control> controls;
  int pair_index{-1};
  char pair_axis{0};
  double kappa{0};

  Layout(const AxisConfig & cfg, const SubwordShape & shape)
  : pair_axis(shape.pair_axis), kappa(cfg.kappa)
  {
    int j = 0;
    for (const auto & s : shape.slots) {
      controls.push_back(cfg.control(s.role));
      Entry e;
      e.axis = axis_letter(s.role);
      switch (s.duration.kind) {
      case DurationKind::Fixed:
        e.kind  = Kind::Fixed;
        e.value = s.duration.upper;
        break;
      case DurationKind::Free:
        e.kind  = Kind::Param;
        e.index = j++;
        break;
      case DurationKind::Tied:
        if (pair_index < 0) { pair_index = j++; }
        e.kind  = Kind::Pair;
        e.index = pair_index;
        break;
      }
      slots.push_back(e);
    }
  }

  /// Tied value on the given axis when the pair symbol equals v.
  double tied_on(char axis, double v) const
  {
    if (axis == pair_axis) { return v; }
    return pair_axis == 'Y' ? tied_x_from_y(kappa, v) : tied_y_from_x(kappa, v);
  }

  double duration(const Entry & e, std::span<const double> params) const
  {
    switch (e.kind) {
    case Kind::Fixed: return e.value;
    case Kind::Param: return params[static_cast<std::size_t>(e.index)];
    case Kind::Pair: return tied_on(e.axis, params[static_cast<std::size_t>(e.index)]);
    }
    return 0;
  }

  std::vector<double> durations(std::span<const double> params) const
  {
    std::vector<double> out;
    out.reserve(slots.size());
    for (const auto & e : slots) { out.push_back(duration(e, params)); }
    return out;
  }

  Quatd product(const AxisConfig & cfg, std::span<const double> params) const
  {
    Quatd acc = Quatd::Identity();
    for (std::size_t i = 0; i < slots.size(); ++i) {
      acc = quat_mul(acc, segment_rotation(cfg, controls[i], duration(slots[i], params)));
    }
    return acc;
  }
};

/// Effective [lower, upper] of free symbol j given the current pair value.
std::pair<double, double> bounds(const Layout & lay, const SubwordShape & shape, std::size_t j, double pair_value)
{
  const auto & f = shape.free[j];
  if (f.dynamic_upper) { return {0.0, lay.tied_on(f.tied_axis, pair_value)}; }
  return {f.lower, f.upper};
}

Quatd durations_quat(const AxisConfig & cfg, const Layout & lay, std::span<const double> durations)
{
  Quatd acc = Quatd::Identity();
  for (std::size_t i = 0; i < durations.size(); ++i) {
    acc = quat_mul(acc, segment_rotation(cfg, lay.controls[i], durations[i]));
  }
  return acc;
}

}  // namespace

std::vector<double> slot_durations(const AxisConfig & cfg, const SubwordShape & shape, std::span<const double> params)
{
  const Layout lay(cfg, shape);
  if (params.size() != shape.free.size()) { throw std::invalid_argument("parameter count mismatch"); }
  const double pair = lay.pair_index >= 0 ? params[static_cast<std::size_t>(lay.pair_index)] : 0.0;
  for (std::size_t j = 0; j < params.size(); ++j) {
    const auto [lo, hi] = bounds(lay, shape, j, pair);
    if (!(params[j] >= lo - kBoundSlack && params[j] <= hi + kBoundSlack)) {
      throw std::invalid_argument("parameter out of range");
    }
  }
  return lay.durations(params);
}

Quatd word_quat(const AxisConfig & cfg, const SubwordShape & shape, std::span<const double> params)
{
  const auto d = slot_durations(cfg, shape, params);
  return durations_quat(cfg, Layout(cfg, shape), d);
}

double fixed_cost(const AxisConfig & cfg, const SubwordShape & shape)
{
  double cost = 0;
  for (const auto & s : shape.slots) {
    if (s.duration.kind == DurationKind::Fixed) { cost += s.duration.upper * control_cost(cfg, cfg.control(s.role)); }
  }
  return cost;
}

namespace {

using Vec4  = Eigen::Vector4d;
using MatJ  = Eigen::Matrix<double, 4, Eigen::Dynamic, Eigen::ColMajor, 4, 3>;
using VecP  = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
using MatPP = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

/// Residual problem in unit-box coordinates: each free symbol is lower + u (upper - lower).
class BoxProblem
{
public:
  BoxProblem(const AxisConfig & cfg, const SubwordShape & shape, const Quatd & target)
  : cfg_(cfg), shape_(shape), lay_(cfg, shape), target_(target.coeffs())
  {
  }

  int dim() const { return static_cast<int>(shape_.free.size()); }

  std::vector<double> params(const VecP & u) const
  {
    std::vector<double> p(shape_.free.size());
    fill_params(u, p);
    return p;
  }

  /// Free-symbol values for box point u; u outside [0, 1] extrapolates linearly.
  void fill_params(const VecP & u, std::span<double> p) const
  {
    double pair = 0;
    if (lay_.pair_index >= 0) {
      const auto j = static_cast<std::size_t>(lay_.pair_index);
      pair         = shape_.free[j].lower + u(lay_.pair_index) * (shape_.free[j].upper - shape_.free[j].lower);
    }
    for (std::size_t j = 0; j < p.size(); ++j) {
      const auto [lo, hi] = bounds(lay_, shape_, j, pair);
      p[j]                = lo + u(static_cast<Eigen::Index>(j)) * (hi - lo);
    }
  }

  Vec4 residual(const VecP & u) const
  {
    std::array<double, 3> buf{};
    const std::span<double> p(buf.data(), shape_.free.size());
    fill_params(u, p);
    const Vec4 w = lay_.product(cfg_, p).coeffs();
    return w.dot(target_) >= 0 ? Vec4(w - target_) : Vec4(w + target_);
  }

  MatJ jacobian(const VecP & u, double h) const
  {
    MatJ J(4, dim());
    for (int j = 0; j < dim(); ++j) {
      VecP up = u, um = u;
      up(j) += h;
      um(j) -= h;
      J.col(j) = (residual(up) - residual(um)) / (2 * h);
    }
    return J;
  }

  double cost(std::span<const double> params) const
  {
    const auto d = lay_.durations(params);
    double c     = 0;
    for (std::size_t i = 0; i < d.size(); ++i) { c += d[i] * control_cost(cfg_, lay_.controls[i]); }
    return c;
  }

  const Layout & layout() const { return lay_; }

private:
  const AxisConfig & cfg_;
  const SubwordShape & shape_;
  Layout lay_;
  Vec4 target_;
};

struct LmResult
{
  VecP u;
  double residual{0};
  int iterations{0};
};

LmResult levenberg_marquardt(const BoxProblem & prob, VecP u, const SolverOptions & opts)
{
  Vec4 r        = prob.residual(u);
  double rn     = r.norm();
  double lambda = 1e-3;
  int it        = 0;
  double checkpoint = rn;
  for (; it < opts.max_iterations && rn > 1e-15; ++it) {
    // A start sliding into a nonzero local minimum is abandoned early.
    if (it > 0 && it % 10 == 0) {
      if (rn > 1e-6 && rn > 0.9 * checkpoint) { break; }
      checkpoint = rn;
    }
    const MatJ J    = prob.jacobian(u, opts.fd_step);
    const MatPP JtJ = J.transpose() * J;
    const VecP g    = J.transpose() * r;
    bool accepted   = false;
    while (lambda < 1e12) {
      MatPP A = JtJ;
      A.diagonal().array() += lambda;
      const VecP step = A.ldlt().solve(-g);
      VecP trial      = (u + step).cwiseMax(0.0).cwiseMin(1.0);
      const Vec4 rt   = prob.residual(trial);
      const double tn = rt.norm();
      if (tn < rn) {
        const double moved = (trial - u).norm();
        u                  = trial;
        r                  = rt;
        rn                 = tn;
        lambda             = std::max(lambda / 10, 1e-12);
        accepted           = true;
        if (moved < 1e-15) { lambda = 1e12; }
        break;
      }
      lambda *= 10;
    }
    if (!accepted || lambda >= 1e12) { break; }
  }
  return {u, rn, it};
}

}  // namespace

ShapeReport solve_shape(const AxisConfig & cfg, const SubwordShape & shape, const Quatd & target, const SolverOptions & opts)
{
  ShapeReport rep;
  rep.shape = shape;
  for (const auto & f : shape.free) {
    if (!f.dynamic_upper && f.upper < f.lower) {
      rep.outcome = ShapeOutcome::Degenerate;
      rep.reason  = "empty range for " + f.name;
      return rep;
    }
  }

  const BoxProblem prob(cfg, shape, target);
  const int d = prob.dim();
  int total   = 1;
  for (int j = 0; j < d; ++j) { total *= opts.grid_points; }

  std::vector<std::vector<double>> found;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<double> best;
  double best_res = 0;

  for (int s = 0; s < total; ++s) {
    VecP u0(d);
    int rem = s;
    for (int j = 0; j < d; ++j) {
      u0(j) = (rem % opts.grid_points + 0.5) / opts.grid_points;
      rem /= opts.grid_points;
    }
    ++rep.starts;
    LmResult lm = levenberg_marquardt(prob, u0, opts);
    rep.iterations += lm.iterations;
    if (!(lm.residual < opts.accept_residual)) { continue; }

    auto p      = prob.params(lm.u);
    const double pair = prob.layout().pair_index >= 0 ? p[static_cast<std::size_t>(prob.layout().pair_index)] : 0.0;
    bool clamped = false;
    for (std::size_t j = 0; j < p.size(); ++j) {
      const auto [lo, hi] = bounds(prob.layout(), shape, j, pair);
      if (std::abs(p[j] - lo) <= kBoundSlack) {
        clamped = clamped || p[j] != lo;
        p[j]    = lo;
      } else if (std::abs(p[j] - hi) <= kBoundSlack) {
        clamped = clamped || p[j] != hi;
        p[j]    = hi;
      }
    }
    double res = lm.residual;
    if (clamped) {
      res = quat_distance(durations_quat(cfg, prob.layout(), prob.layout().durations(p)), target);
      if (!(res < opts.accept_residual)) { continue; }
    }
    ++rep.converged;

    bool dup = false;
    for (const auto & q : found) {
      double dist = 0;
      for (std::size_t j = 0; j < p.size(); ++j) { dist = std::max(dist, std::abs(q[j] - p[j])); }
      dup = dup || dist < opts.dedup_distance;
    }
    if (dup) { continue; }
    found.push_back(p);
    const double c = prob.cost(p);
    if (c < best_cost) {
      best_cost = c;
      best      = p;
      best_res  = res;
    }
  }
  rep.distinct = static_cast<int>(found.size());
  if (found.empty()) {
    rep.outcome = ShapeOutcome::Infeasible;
    return rep;
  }

  Plan plan;
  const auto dur = prob.layout().durations(best);
  for (std::size_t i = 0; i < dur.size(); ++i) {
    if (dur[i] > kBoundSlack) { plan.segments.push_back({prob.layout().controls[i], dur[i]}); }
  }
  plan.total_cost     = segments_cost(cfg, plan.segments);
  plan.residual       = std::max(best_res, quat_distance(segments_quat(cfg, plan.segments), target));
  plan.pattern_id     = std::string(to_string(shape.pattern));
  plan.symmetry_index = shape.symmetry.index;
  plan.window         = {shape.k, shape.m};
  for (std::size_t j = 0; j < best.size(); ++j) { plan.parameters[shape.free[j].name] = best[j]; }
  rep.outcome = ShapeOutcome::Solved;
  rep.plan    = std::move(plan);
  return rep;
}

namespace {

std::string shape_key(const SubwordShape & s)
{
  std::string key;
  char buf[64];
  for (const auto & slot : s.slots) {
    const auto & d = slot.duration;
    std::snprintf(buf, sizeof buf, "%d:%d:%.17g:%.17g|", static_cast<int>(slot.role), static_cast<int>(d.kind), d.lower, d.upper);
    key += buf;
  }
  for (const auto & f : s.free) {
    std::snprintf(buf, sizeof buf, "%d%c;", f.dynamic_upper ? 1 : 0, f.tied_axis ? f.tied_axis : '-');
    key += buf;
  }
  key += s.pair_axis ? s.pair_axis : '-';
  return key;
}

std::string shape_label(const SubwordShape & s)
{
  return std::string(to_string(s.pattern)) + "/" + std::to_string(s.symmetry.index) + "/" + std::to_string(s.k) + "-" +
         std::to_string(s.m);
}

/// Strict tie-break order among plans of equal cost.
bool before(const Plan & a, const Plan & b)
{
  if (a.segments.size() != b.segments.size()) { return a.segments.size() < b.segments.size(); }
  if (a.pattern_id != b.pattern_id) { return a.pattern_id < b.pattern_id; }
  if (a.symmetry_index != b.symmetry_index) { return a.symmetry_index < b.symmetry_index; }
  return a.window < b.window;
}

int resolve_threads(int requested)
{
  if (requested > 0) { return requested; }
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) { n = 1; }
  if (const char * env = std::getenv("TWOAXIS_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) { n = std::min(n, cap); }
  }
  return n;
}

}  // namespace

std::vector<SubwordShape> catalog_shapes(const AxisConfig & cfg)
{
  std::vector<SubwordShape> all;
  for (const auto & p : catalog(cfg)) {
    for (auto g : orbit_elements(p.orbit)) {
      auto shapes = enumerate_subwords(p, g);
      all.insert(all.end(), std::make_move_iterator(shapes.begin()), std::make_move_iterator(shapes.end()));
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const SubwordShape & a, const SubwordShape & b) {
    const auto ia = to_string(a.pattern), ib = to_string(b.pattern);
    if (ia != ib) { return ia < ib; }
    if (a.symmetry.index != b.symmetry.index) { return a.symmetry.index < b.symmetry.index; }
    return std::pair(a.k, a.m) < std::pair(b.k, b.m);
  });
  std::set<std::string> seen;
  std::vector<SubwordShape> out;
  for (auto & s : all) {
    if (seen.insert(shape_key(s)).second) { out.push_back(std::move(s)); }
  }
  return out;
}

PlanResult plan_with_report(const AxisConfig & cfg, const Quatd & target, const SolverOptions & opts)
{
  if (std::abs(target.norm() - 1) > 1e-9) { throw std::invalid_argument("target quaternion not normalized"); }
  PlanResult result;
  if (quat_distance(target, Quatd(Quatd::Identity())) <= 1e-12) {
    result.plan.residual = quat_distance(target, Quatd(Quatd::Identity()));
    return result;
  }

  const auto shapes = catalog_shapes(cfg);
  std::vector<std::size_t> order(shapes.size());
  std::vector<double> lower(shapes.size());
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    order[i] = i;
    lower[i] = fixed_cost(cfg, shapes[i]);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lower[a] < lower[b]; });

  std::vector<ShapeReport> reports(shapes.size());
  std::mutex mu;
  double best_cost = std::numeric_limits<double>::infinity();
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t n = next.fetch_add(1);
      if (n >= order.size()) { return; }
      const std::size_t i = order[n];
      if (opts.prune) {
        std::lock_guard lock(mu);
        if (lower[i] > best_cost + opts.tie_tolerance) {
          reports[i].shape   = shapes[i];
          reports[i].outcome = ShapeOutcome::Pruned;
          reports[i].reason  = "fixed-slot cost exceeds incumbent";
          continue;
        }
      }
      ShapeReport rep = solve_shape(cfg, shapes[i], target, opts);
      std::lock_guard lock(mu);
      if (rep.plan) { best_cost = std::min(best_cost, rep.plan->total_cost); }
      reports[i] = std::move(rep);
    }
  };

  const int threads = std::min<int>(resolve_threads(opts.threads), static_cast<int>(shapes.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) { pool.emplace_back(worker); }
    for (auto & t : pool) { t.join(); }
  }

  const Plan * winner = nullptr;
  for (const auto & r : reports) {
    if (!r.plan) { continue; }
    const Plan & p = *r.plan;
    if (!winner || p.total_cost < winner->total_cost - opts.tie_tolerance ||
        (std::abs(p.total_cost - winner->total_cost) <= opts.tie_tolerance && before(p, *winner))) {
      winner = &p;
    }
  }
  if (!winner) { throw std::runtime_error("planner incomplete for target"); }
  result.plan = *winner;
  for (const auto & r : reports) {
    if (r.plan && &*r.plan != winner && std::abs(r.plan->total_cost - winner->total_cost) <= opts.tie_tolerance) {
      result.ties.push_back(shape_label(r.shape));
    }
  }
  result.report = std::move(reports);
  return result;
}

Plan plan(const AxisConfig & cfg, const Quatd & target, const SolverOptions & opts)
{
  return plan_with_report(cfg, target, opts).plan;
}

std::vector<CostPoint> plan_cost_curve(
  const AxisConfig & cfg, const Vec3d & axis, std::span<const double> t_grid, const SolverOptions & opts)
{
  if (!(axis.norm() > 0)) { throw std::invalid_argument("zero rotation axis"); }
  const Vec3d n = axis.normalized();
  std::vector<CostPoint> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    const Plan p = plan(cfg, quat_exp<double>((t / 2) * n), opts);
    out.push_back({t, p.total_cost, p.pattern_id});
  }
  return out;
}

}  // namespace twoaxis
