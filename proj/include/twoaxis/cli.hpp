#ifndef TWOAXIS__CLI_HPP_
#define TWOAXIS__CLI_HPP_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"
#include "oracle.hpp"
#include "pmp.hpp"
#include "solver.hpp"

namespace twoaxis::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kOk             = 0,
  kBadInput       = 1,
  kIncomplete     = 2,  ///< planner found no feasible shape
  kVerifyFailed   = 3,  ///< plan failed certification or realization
};

/**
 * @brief Parses a target rotation.
 *
 * Forms: quat:a,b,c,d (normalized), axis-angle:x,y,z:angle,
 * matrix:m00,...,m22 (row-major, orthonormal within 1e-8, det +1) and
 * euler:X:0.3,Y:-0.5,Z:1 (product left to right of rotations about the
 * configuration's X, Y and unit Z axes). Angles are degrees when degrees is set.
 * Throws std::invalid_argument on malformed input.
 */
Quatd parse_target(std::string_view spec, const AxisConfig & cfg, bool degrees = false);

/// "x,y,z" or "a,b,c,d" style real lists.
std::vector<double> parse_reals(std::string_view text);

/// Plan JSON with numbers written to 17 significant digits.
std::string plan_to_json(const AxisConfig & cfg, const Quatd & target, const Plan & plan);

/// A plan file read back: configuration, target and segments.
struct PlanFile
{
  double alpha{0};
  double kappa{0};
  Quatd target{Quatd::Identity()};
  Plan plan;
};

/// Throws std::invalid_argument on malformed JSON or missing fields.
PlanFile plan_from_json(std::string_view text);

std::string oracle_to_json(const AxisConfig & cfg, const OracleResult & res);

std::string check_to_json(const CheckReport & report, double residual, bool residual_pass);

/// Patterns of the regime as an aligned text table: id, word, constraint, orbit.
std::string patterns_table(const AxisConfig & cfg);

/// Runs the tool on argv; output and diagnostics go to out and err.
int run(int argc, const char * const * argv, std::ostream & out, std::ostream & err);

/// Convenience overload for tests: args exclude the program name.
int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err);

}  // namespace twoaxis::cli

#endif  // TWOAXIS__CLI_HPP_
