#ifndef TWOAXIS__ORACLE_HPP_
#define TWOAXIS__ORACLE_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "config.hpp"
#include "solver.hpp"

namespace twoaxis {

struct OracleSettings
{
  double delta{0};
  double quant{0};
  int max_segments{0};
  int restarts{0};
};

/// Best decomposition found by a catalog-free search; an upper bound on the infimum.
struct OracleResult
{
  std::string method;
  double cost_upper{0};
  std::vector<Segment> plan_found;
  double residual{0};
  OracleSettings settings;
  long expansions{0};
};

/// Thrown when graph_search runs out of expansions; bound is the frontier cost reached.
class OracleBudgetExhausted : public std::runtime_error
{
public:
  OracleBudgetExhausted(double bound, long expansions);
  double partial_bound;
  long expansions;
};

struct GraphSearchOptions
{
  long max_expansions{8'000'000};
  /// Cap on steps of one edge while waiting for the quantized cell to change.
  int max_steps_per_edge{64};
  /// Key states by (cell, last control) instead of the cell alone.
  bool direction_states{true};
};

/**
 * @brief Uniform-cost search over quantized unit quaternions with controls +-X, +-Y.
 *
 * Cells are coordinates rounded to multiples of quant, sign-canonicalized so the
 * first nonzero entry is positive. An edge applies one control in steps of delta
 * until the cell changes. Each cell keeps the exact quaternion of its cheapest
 * known path, so the returned path replays exactly; it ends in the target's cell.
 */
OracleResult graph_search(
  const AxisConfig & cfg, const Quatd & target, double delta, double quant, const GraphSearchOptions & opts = {});

/**
 * @brief Direct cost minimization over all control words up to max_segments.
 *
 * Controls are +-X, +-Y, +-W+, +-W- with parallel duplicates removed, and no two
 * consecutive controls parallel. Words of up to three letters are solved for
 * feasibility by Levenberg-Marquardt; longer words restore feasibility by
 * Gauss-Newton and then follow the cost gradient projected onto the null space
 * of the constraint Jacobian. Each word is started from `restarts` seeded
 * random points; the result is +infinity if nothing is feasible.
 */
OracleResult word_descent(
  const AxisConfig & cfg, const Quatd & target, int max_segments, int restarts, std::uint64_t seed = 0x5eed);

}  // namespace twoaxis

#endif  // TWOAXIS__ORACLE_HPP_
