#ifndef TWOAXIS__PATTERNS_HPP_
#define TWOAXIS__PATTERNS_HPP_

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"

namespace twoaxis {

enum class PatternId { I, II, III, IV, V, VI, VII, VIII, IX, X };

std::string_view to_string(PatternId id);

/// Symmetry subgroup under which a pattern's variants are also candidates.
enum class Orbit {
  FullD4,      ///< {±X, ±Y}, 8 elements
  HalfMirror,  ///< (±X, ±Y), 4 elements
  HalfSwap,    ///< {-X, -Y}, 4 elements
  NegOnly      ///< (-X, -Y), 2 elements
};

std::string_view to_string(Orbit o);

/**
 * @brief Element of the dihedral group of the control square.
 *
 * Acts on (a, b) coefficient signs: optionally swap X and Y, then negate the
 * first and/or second coefficient. index = 4*swap + negate_a + 2*negate_b, so
 * sigma1 (Y -> -Y) = 2, sigma2 (X <-> Y) = 4 and nu (negate all) = 3. The W
 * controls are labelled by their quadrant: W+ ~ (+,-), W- ~ (+,+).
 */
struct SymmetryElement
{
  int index{0};

  ControlTag apply(ControlTag t) const;
  /// (*this) after h.
  SymmetryElement compose(SymmetryElement h) const;

  static constexpr SymmetryElement identity() { return {0}; }
  static constexpr SymmetryElement sigma1() { return {2}; }
  static constexpr SymmetryElement sigma2() { return {4}; }
  static constexpr SymmetryElement nu() { return {3}; }

  friend bool operator==(SymmetryElement, SymmetryElement) = default;
};

/// Elements of an orbit subgroup, identity first.
std::vector<SymmetryElement> orbit_elements(Orbit o);

/// Where a slot's duration value comes from. Hat/TwoHat/Tied read the slot's own axis letter.
enum class DurationSource { Pi, HatOwnAxis, TwoHatOwnAxis, WCap, TiedOwnAxis };

enum class DurationKind { Fixed, Free, Tied };

struct SlotDuration
{
  DurationKind kind{DurationKind::Fixed};
  DurationSource source{DurationSource::Pi};
  std::string symbol;  ///< empty for Fixed
  double lower{0};
  double upper{0};  ///< Fixed: the value. Free/Tied: the static upper bound.
};

struct Slot
{
  ControlTag role{ControlTag::PlusX};
  SlotDuration duration;
};

/// Values needed to resolve symbolic durations against a configuration.
struct PatternConstants
{
  double t_hat_x{0};
  double t_hat_y{0};
  double w_plus_cap{0};
  double w_minus_cap{0};

  static PatternConstants from(const AxisConfig & cfg);
};

struct Pattern
{
  PatternId id{PatternId::I};
  std::vector<Slot> slots;
  /// tan(t_X / 2) = kappa tan(t_Y / 2) couples the Tied slots.
  bool tan_relation{false};
  Orbit orbit{Orbit::FullD4};
  PatternConstants constants;
  /// Symmetry already applied to the base pattern.
  SymmetryElement symmetry{};

  /// "R(pi X) R(t W+) R(pi X)" style rendering.
  std::string word() const;
  std::string constraint() const;
};

/// Largest parameter time t of R(t W) whose physical angle is pi, for the l1-normalized W.
double w_cap(const AxisConfig & cfg, ControlTag w);

/// The base (identity-symmetry) pattern with durations resolved for cfg.
Pattern make_pattern(const AxisConfig & cfg, PatternId id, Orbit orbit);

/// Patterns whose subwords contain an optimal decomposition in cfg's regime.
std::vector<Pattern> catalog(const AxisConfig & cfg);

/**
 * @brief Relabels control roles by g.
 *
 * Durations follow their axis letters: a t_hat on a slot that becomes a Y slot
 * becomes t_hat_Y, and the Tied symbols rename so the tangent relation reads
 * against the image roles. Throws std::invalid_argument if g is not in p's orbit.
 */
Pattern apply_symmetry(const Pattern & p, SymmetryElement g);

/// A free parameter of a subword shape.
struct FreeSymbol
{
  std::string name;
  double lower{0};
  double upper{0};
  /// Upper bound equals the current value of the Tied symbol on this axis.
  bool dynamic_upper{false};
  char tied_axis{0};
};

/**
 * @brief Contiguous window (k..m, 1-based) of a pattern variant.
 *
 * End slots are demoted to Free with upper bound equal to their original value.
 * A Tied pair driven by an interior slot becomes the single symbol t_Y (or t_X
 * when only an X slot is interior).
 */
struct SubwordShape
{
  PatternId pattern{PatternId::I};
  SymmetryElement symmetry{};
  int k{1};
  int m{1};
  std::vector<Slot> slots;
  bool tan_relation{false};
  /// 'X' or 'Y' if the Tied pair is free in this window, else 0.
  char pair_axis{0};
  std::vector<FreeSymbol> free;

  std::string word() const;
};

std::vector<SubwordShape> enumerate_subwords(const Pattern & p, SymmetryElement g);

/// t_X = 2 atan(kappa tan(t_Y / 2)), continuous on [0, pi] with t_X(pi) = pi.
double tied_x_from_y(double kappa, double t_y);
/// Inverse of tied_x_from_y for kappa > 0.
double tied_y_from_x(double kappa, double t_x);

}  // namespace twoaxis

#endif  // TWOAXIS__PATTERNS_HPP_
