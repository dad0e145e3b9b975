#ifndef TWOAXIS__SOLVER_HPP_
#define TWOAXIS__SOLVER_HPP_

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "patterns.hpp"

namespace twoaxis {

/// One constant-control piece R(duration * u); duration is parameter time.
struct Segment
{
  Control control;
  double duration{0};
};

/**
 * @brief A concrete decomposition of a target rotation.
 *
 * pattern_id is "I".."X", or "empty" for the identity target. window is the
 * 1-based (k, m) slice of the pattern variant; (0, 0) for the empty plan.
 */
struct Plan
{
  std::vector<Segment> segments;
  double total_cost{0};
  double residual{0};
  std::string pattern_id{"empty"};
  int symmetry_index{0};
  std::array<int, 2> window{0, 0};
  std::map<std::string, double> parameters;
};

/// Product R(t1 u1) ... R(tn u1) in SU(2).
Quatd segments_quat(const AxisConfig & cfg, std::span<const Segment> segments);

/// Sum of duration * control_cost.
double segments_cost(const AxisConfig & cfg, std::span<const Segment> segments);

/**
 * @brief Durations of every slot of shape for the given free-symbol values.
 *
 * params follow shape.free. The Tied pair is resolved through the tangent
 * relation. Throws std::invalid_argument("parameter out of range") if a value is
 * outside its bounds by more than 1e-12.
 */
std::vector<double> slot_durations(const AxisConfig & cfg, const SubwordShape & shape, std::span<const double> params);

/// Ordered product of segment_rotation over the slots of shape.
Quatd word_quat(const AxisConfig & cfg, const SubwordShape & shape, std::span<const double> params);

struct SolverOptions
{
  int grid_points{9};           ///< multistart points per free dimension
  double accept_residual{1e-9};
  int max_iterations{200};
  double fd_step{1e-6};
  double dedup_distance{1e-8};
  double tie_tolerance{1e-10};
  /// Skip shapes whose fixed-slot cost already exceeds the best plan so far.
  bool prune{true};
  /// Worker threads for plan(); 0 reads TWOAXIS_THREADS, else hardware concurrency.
  int threads{0};
};

enum class ShapeOutcome { Solved, Infeasible, Degenerate, Pruned };

std::string_view to_string(ShapeOutcome o);

struct ShapeReport
{
  SubwordShape shape;
  ShapeOutcome outcome{ShapeOutcome::Infeasible};
  std::optional<Plan> plan;
  std::string reason;
  int starts{0};
  int converged{0};      ///< starts that reached accept_residual
  int distinct{0};       ///< distinct solutions after deduplication
  long iterations{0};    ///< LM iterations summed over starts
};

/**
 * @brief Fits the free parameters of one shape to target.
 *
 * Levenberg-Marquardt on the lift-adjusted quaternion residual, multistarted on
 * a uniform grid of the parameter box. Returns the cheapest accepted solution.
 * Non-convergence is reported as Infeasible.
 */
ShapeReport solve_shape(
  const AxisConfig & cfg, const SubwordShape & shape, const Quatd & target, const SolverOptions & opts = {});

/// Cost paid by the Fixed slots of a shape; a lower bound for any of its solutions.
double fixed_cost(const AxisConfig & cfg, const SubwordShape & shape);

/**
 * @brief Every distinct shape of the regime catalog, in tie-break order.
 *
 * Shapes whose slot lists coincide (same roles and duration specs) are kept
 * once, under the lexicographically smallest pattern id, then symmetry, then window.
 */
std::vector<SubwordShape> catalog_shapes(const AxisConfig & cfg);

struct PlanResult
{
  Plan plan;
  std::vector<ShapeReport> report;
  /// Other shapes whose cost is within tie_tolerance of the winner, as "id/sym/k-m".
  std::vector<std::string> ties;
};

/// Minimum-cost plan with the per-shape report. Throws std::runtime_error("planner incomplete for target").
PlanResult plan_with_report(const AxisConfig & cfg, const Quatd & target, const SolverOptions & opts = {});

Plan plan(const AxisConfig & cfg, const Quatd & target, const SolverOptions & opts = {});

struct CostPoint
{
  double t{0};
  double cost{0};
  std::string pattern_id;
};

/// plan() of the lift of R(t axis) for each t in t_grid.
std::vector<CostPoint> plan_cost_curve(
  const AxisConfig & cfg, const Vec3d & axis, std::span<const double> t_grid, const SolverOptions & opts = {});

}  // namespace twoaxis

#endif  // TWOAXIS__SOLVER_HPP_
