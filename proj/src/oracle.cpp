#include "twoaxis/oracle.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <random>
#include <string>
#include <unordered_map>

namespace twoaxis {

OracleBudgetExhausted::OracleBudgetExhausted(double bound, long n)
: std::runtime_error("oracle budget exhausted (best partial bound " + std::to_string(bound) + ")"),
  partial_bound(bound),
  expansions(n)
{
}

namespace {

std::uint64_t cell_key(const Quatd & q, double quant)
{
  std::array<long, 4> ix{};
  for (int i = 0; i < 4; ++i) { ix[static_cast<std::size_t>(i)] = std::lround(q.coeffs()(i) / quant); }
  for (long v : ix) {
    if (v == 0) { continue; }
    if (v < 0) {
      for (auto & w : ix) { w = -w; }
    }
    break;
  }
  std::uint64_t key = 0;
  for (long v : ix) { key = (key << 15) | static_cast<std::uint64_t>((v + 16384) & 0x7fff); }
  return key;
}

struct Cell
{
  double cost{std::numeric_limits<double>::infinity()};
  Quatd rep{Quatd::Identity()};
  std::uint64_t parent{0};
  int control{-1};
  int steps{0};
  bool closed{false};
};

}  // namespace

OracleResult graph_search(
  const AxisConfig & cfg, const Quatd & target, double delta, double quant, const GraphSearchOptions & opts)
{
  if (!(delta > 0 && delta <= 0.1)) { throw std::invalid_argument("delta out of range"); }
  if (!(quant > 0 && quant <= 0.5 && 1 / quant < 16000)) { throw std::invalid_argument("quant out of range"); }

  OracleResult res;
  res.method   = "graph_search";
  res.settings = {delta, quant, 0, 0};

  const std::array<ControlTag, 4> tags{ControlTag::PlusX, ControlTag::MinusX, ControlTag::PlusY, ControlTag::MinusY};
  std::array<Control, 4> controls{};
  std::array<Quatd, 4> step{};
  std::array<double, 4> step_cost{};
  for (std::size_t i = 0; i < 4; ++i) {
    controls[i]  = cfg.control(tags[i]);
    step[i]      = segment_rotation(cfg, controls[i], delta);
    step_cost[i] = delta * control_cost(cfg, controls[i]);
  }

  // States are (cell, last control); the low 3 bits hold the control + 1.
  const int tag_bits        = opts.direction_states ? 3 : 0;
  const std::uint64_t goal  = cell_key(target, quant);
  const std::uint64_t start = cell_key(Quatd::Identity(), quant) << tag_bits;

  std::unordered_map<std::uint64_t, Cell> cells;
  cells.reserve(1 << 20);
  using Entry = std::pair<double, std::uint64_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  cells[start] = Cell{0, Quatd::Identity(), start, -1, 0, false};
  open.push({0, start});

  long expansions       = 0;
  bool found            = false;
  std::uint64_t goal_key = 0;
  while (!open.empty()) {
    const auto [g, key] = open.top();
    open.pop();
    Cell & cell = cells[key];
    if (cell.closed || g > cell.cost) { continue; }
    cell.closed = true;
    if ((key >> tag_bits) == goal) {
      found    = true;
      goal_key = key;
      break;
    }
    if (++expansions > opts.max_expansions) { throw OracleBudgetExhausted(g, expansions); }
    const Quatd rep = cell.rep;
    for (std::size_t u = 0; u < 4; ++u) {
      Quatd q = rep;
      for (int k = 1; k <= opts.max_steps_per_edge; ++k) {
        q                     = quat_mul(q, step[u]);
        const std::uint64_t c = cell_key(q, quant);
        if (c == (key >> tag_bits)) { continue; }
        const std::uint64_t n = (c << tag_bits) | (opts.direction_states ? u + 1 : 0);
        const double cost = g + k * step_cost[u];
        Cell & next       = cells[n];
        if (!next.closed && cost < next.cost) {
          next = Cell{cost, q.normalized(), key, static_cast<int>(u), k, false};
          open.push({cost, n});
        }
        break;
      }
    }
  }
  res.expansions = expansions;
  if (!found) { throw std::runtime_error("oracle goal cell unreachable"); }

  std::vector<Segment> rev;
  for (std::uint64_t k = goal_key; k != start;) {
    const Cell & c = cells[k];
    rev.push_back({controls[static_cast<std::size_t>(c.control)], c.steps * delta});
    k = c.parent;
  }
  for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
    if (!res.plan_found.empty() && res.plan_found.back().control.tag == it->control.tag) {
      res.plan_found.back().duration += it->duration;
    } else {
      res.plan_found.push_back(*it);
    }
  }
  res.cost_upper = segments_cost(cfg, res.plan_found);
  res.residual   = quat_distance(segments_quat(cfg, res.plan_found), target);
  return res;
}

namespace {

using VecN = Eigen::VectorXd;
using MatJ = Eigen::Matrix<double, 3, Eigen::Dynamic>;

/// Residual vec(conj(target) w) of a fixed control word, with its exact Jacobian.
class WordProblem
{
public:
  WordProblem(const AxisConfig & cfg, std::vector<Control> word, const Quatd & target)
  : word_(std::move(word)), tconj_(quat_conj(target))
  {
    for (const auto & u : word_) {
      const Vec3d v = cfg.vector(u);
      half_.push_back(make_quat(v.x() / 2, v.y() / 2, v.z() / 2, 0.0));
      axis_.push_back(v);
      cost_.push_back(control_cost(cfg, u));
      upper_.push_back(std::numbers::pi / v.norm());
    }
  }

  int size() const { return static_cast<int>(word_.size()); }
  double upper(int i) const { return upper_[static_cast<std::size_t>(i)]; }

  double cost(const VecN & t) const
  {
    double c = 0;
    for (int i = 0; i < size(); ++i) { c += cost_[static_cast<std::size_t>(i)] * t(i); }
    return c;
  }

  VecN cost_gradient() const { return Eigen::Map<const VecN>(cost_.data(), size()); }

  Quatd product(const VecN & t) const
  {
    Quatd acc = Quatd::Identity();
    for (int i = 0; i < size(); ++i) { acc = quat_mul(acc, factor(i, t(i))); }
    return acc;
  }

  Eigen::Vector3d residual(const VecN & t, MatJ * jac = nullptr) const
  {
    const int n = size();
    std::vector<Quatd> f(static_cast<std::size_t>(n));
    std::vector<Quatd> suffix(static_cast<std::size_t>(n) + 1, Quatd::Identity());
    for (int i = 0; i < n; ++i) { f[static_cast<std::size_t>(i)] = factor(i, t(i)); }
    for (int i = n; i-- > 0;) {
      suffix[static_cast<std::size_t>(i)] = quat_mul(f[static_cast<std::size_t>(i)], suffix[static_cast<std::size_t>(i) + 1]);
    }
    Quatd e           = quat_mul(tconj_, suffix[0]);
    const double sign = e.w() >= 0 ? 1.0 : -1.0;
    if (jac) {
      jac->resize(3, n);
      Quatd prefix = tconj_;
      for (int i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const Quatd d  = quat_mul(quat_mul(prefix, half_[idx]), suffix[idx]);
        jac->col(i)    = sign * d.vec();
        prefix         = quat_mul(prefix, f[idx]);
      }
    }
    return sign * e.vec();
  }

  double distance(const VecN & t, const Quatd & target) const { return quat_distance(product(t), target); }

private:
  Quatd factor(int i, double t) const { return quat_exp<double>((t / 2) * axis_[static_cast<std::size_t>(i)]); }

  std::vector<Control> word_;
  Quatd tconj_;
  std::vector<Quatd> half_;
  std::vector<Vec3d> axis_;
  std::vector<double> cost_;
  std::vector<double> upper_;
};

VecN clamp_box(const WordProblem & wp, VecN t)
{
  for (int i = 0; i < wp.size(); ++i) { t(i) = std::clamp(t(i), 0.0, wp.upper(i)); }
  return t;
}

/// Levenberg-Marquardt on the residual inside the box; returns the final residual norm.
double feasibility_lm(const WordProblem & wp, VecN & t, int max_iterations)
{
  MatJ J;
  Eigen::Vector3d r = wp.residual(t, &J);
  double rn         = r.norm();
  double lambda     = 1e-3;
  for (int it = 0; it < max_iterations && rn > 1e-15; ++it) {
    const Eigen::MatrixXd A0 = J.transpose() * J;
    const VecN g             = J.transpose() * r;
    bool accepted            = false;
    while (lambda < 1e12) {
      Eigen::MatrixXd A = A0;
      A.diagonal().array() += lambda;
      const VecN trial = clamp_box(wp, t + A.ldlt().solve(-g));
      MatJ Jt;
      const Eigen::Vector3d rt = wp.residual(trial, &Jt);
      if (rt.norm() < rn) {
        accepted = (trial - t).norm() > 1e-16;
        t        = trial;
        r        = rt;
        J        = Jt;
        rn       = rt.norm();
        lambda   = std::max(lambda / 10, 1e-12);
        break;
      }
      lambda *= 10;
    }
    if (!accepted) { break; }
  }
  return rn;
}

/// Minimum-norm Gauss-Newton back onto the constraint, moving only unfixed variables.
double restore(const WordProblem & wp, VecN & t, const std::vector<bool> & fixed)
{
  MatJ J;
  Eigen::Vector3d r = wp.residual(t, &J);
  double rn         = r.norm();
  for (int it = 0; it < 30 && rn > 1e-14; ++it) {
    for (int i = 0; i < wp.size(); ++i) {
      if (fixed[static_cast<std::size_t>(i)]) { J.col(i).setZero(); }
    }
    const Eigen::Matrix3d JJt = J * J.transpose() + 1e-14 * Eigen::Matrix3d::Identity();
    const VecN step           = -J.transpose() * JJt.ldlt().solve(r);
    double alpha              = 1;
    bool improved             = false;
    for (int ls = 0; ls < 20; ++ls, alpha /= 2) {
      const VecN trial         = clamp_box(wp, t + alpha * step);
      MatJ Jt;
      const Eigen::Vector3d rt = wp.residual(trial, &Jt);
      if (rt.norm() < rn) {
        t        = trial;
        r        = rt;
        J        = Jt;
        rn       = rt.norm();
        improved = true;
        break;
      }
    }
    if (!improved) { break; }
  }
  return rn;
}

/// Projected-gradient cost descent on the feasible set of a word of 4+ letters.
double descend(const WordProblem & wp, VecN & t)
{
  const int n       = wp.size();
  const VecN c      = wp.cost_gradient();
  std::vector<bool> none(static_cast<std::size_t>(n), false);
  if (restore(wp, t, none) > 1e-10) { return std::numeric_limits<double>::infinity(); }
  double alpha = 0.2;
  for (int it = 0; it < 300; ++it) {
    MatJ J;
    wp.residual(t, &J);
    std::vector<bool> fixed(static_cast<std::size_t>(n), false);
    VecN d = VecN::Zero(n);
    for (int pass = 0; pass <= n; ++pass) {
      MatJ Jf = J;
      VecN cf = c;
      for (int i = 0; i < n; ++i) {
        if (fixed[static_cast<std::size_t>(i)]) {
          Jf.col(i).setZero();
          cf(i) = 0;
        }
      }
      const Eigen::Matrix3d JJt = Jf * Jf.transpose() + 1e-12 * Eigen::Matrix3d::Identity();
      d                         = -(cf - Jf.transpose() * JJt.ldlt().solve(Jf * cf));
      bool changed              = false;
      for (int i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        if (fixed[idx]) { continue; }
        if ((t(i) <= 1e-12 && d(i) < 0) || (t(i) >= wp.upper(i) - 1e-12 && d(i) > 0)) {
          fixed[idx] = true;
          changed    = true;
        }
      }
      if (!changed) { break; }
    }
    if (d.norm() < 1e-12) { break; }

    const double before = wp.cost(t);
    bool accepted       = false;
    for (int ls = 0; ls < 40 && alpha > 1e-14; ++ls) {
      VecN trial = clamp_box(wp, t + alpha * d);
      if (restore(wp, trial, fixed) <= 1e-11 && wp.cost(trial) < before - 1e-14) {
        t        = trial;
        accepted = true;
        alpha    = std::min(alpha * 2, 1.0);
        break;
      }
      alpha /= 2;
    }
    if (!accepted) { break; }
  }
  return restore(wp, t, none);
}

}  // namespace

OracleResult word_descent(const AxisConfig & cfg, const Quatd & target, int max_segments, int restarts, std::uint64_t seed)
{
  if (max_segments < 0 || max_segments > 8) { throw std::invalid_argument("max_segments out of range"); }
  OracleResult res;
  res.method     = "word_descent";
  res.settings   = {0, 0, max_segments, restarts};
  res.cost_upper = std::numeric_limits<double>::infinity();
  res.residual   = std::numeric_limits<double>::infinity();

  if (quat_distance(target, Quatd(Quatd::Identity())) < 1e-8) {
    res.cost_upper = 0;
    res.residual   = quat_distance(target, Quatd(Quatd::Identity()));
    return res;
  }

  std::vector<Control> alphabet;
  for (ControlTag tag :
    {ControlTag::PlusX,
      ControlTag::MinusX,
      ControlTag::PlusY,
      ControlTag::MinusY,
      ControlTag::PlusWp,
      ControlTag::MinusWp,
      ControlTag::PlusWm,
      ControlTag::MinusWm}) {
    const Control u = cfg.control(tag);
    bool dup        = false;
    for (const auto & v : alphabet) { dup = dup || (std::abs(u.a - v.a) < 1e-12 && std::abs(u.b - v.b) < 1e-12); }
    if (!dup) { alphabet.push_back(u); }
  }
  auto parallel = [](const Control & u, const Control & v) { return std::abs(u.a * v.b - u.b * v.a) < 1e-12; };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<int> idx;
  std::function<void(int)> visit = [&](int n) {
    if (static_cast<int>(idx.size()) == n) {
      std::vector<Control> word;
      for (int i : idx) { word.push_back(alphabet[static_cast<std::size_t>(i)]); }
      const WordProblem wp(cfg, word, target);
      for (int r = 0; r < restarts; ++r) {
        VecN t(n);
        for (int i = 0; i < n; ++i) { t(i) = unit(rng) * wp.upper(i); }
        ++res.expansions;
        double rn = n <= 3 ? feasibility_lm(wp, t, 100) : descend(wp, t);
        if (!(rn < 1e-9)) { continue; }
        const double dist = wp.distance(t, target);
        const double cost = wp.cost(t);
        if (dist < 1e-8 && cost < res.cost_upper) {
          res.cost_upper = cost;
          res.residual   = dist;
          res.plan_found.clear();
          for (int i = 0; i < n; ++i) { res.plan_found.push_back({word[static_cast<std::size_t>(i)], t(i)}); }
        }
      }
      return;
    }
    for (int a = 0; a < static_cast<int>(alphabet.size()); ++a) {
      if (!idx.empty() && parallel(alphabet[static_cast<std::size_t>(idx.back())], alphabet[static_cast<std::size_t>(a)])) {
        continue;
      }
      idx.push_back(a);
      visit(n);
      idx.pop_back();
    }
  };
  for (int n = 1; n <= max_segments; ++n) { visit(n); }
  return res;
}

}  // namespace twoaxis
