#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

// Exact algebra of piecewise-constant functions on I = [0, alpha),
// alpha in {1, inf}: distribution function, decreasing rearrangement,
// maximal function and the cumulative profile t -> integral_0^t x*.
//
// Arithmetic contract: no hidden tolerances.  Breakpoints are deduplicated
// at exact equality, values are compared bitwise, and every sum over pieces
// is taken left-to-right in a fixed order, so that e.g.
// distribution(rearrange(x), l) == distribution(x, l) holds exactly.

namespace rik {

enum class Extent { unit, infinite };

struct MeasureSpace {
  Extent alpha = Extent::unit;

  bool finite() const { return alpha == Extent::unit; }
  // Length of I as a double; +inf for the half line.
  double length() const;
  bool operator==(const MeasureSpace&) const = default;
};

inline constexpr MeasureSpace unit_space{Extent::unit};
inline constexpr MeasureSpace halfline_space{Extent::infinite};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

// One constant piece of a step function, [lo, hi) with value v.
struct Piece {
  double lo = 0.0;
  double hi = 0.0;
  double value = 0.0;
};

// A real function on [0, alpha) that is constant on finitely many
// half-open intervals [t_{k-1}, t_k) and constant (the tail) on the rest.
//
// Canonical form: breakpoints start at 0 and increase strictly, no two
// adjacent pieces share a value, the last piece value differs from the
// tail, and the final breakpoint is < alpha.  Structural equality of
// canonical forms is function equality.
//
// On the half line a nonzero tail is only representable when the function
// is flagged sup-only (it then participates in sup-norm evaluation but not
// in rearrangement or integration).
class StepFunction {
 public:
  StepFunction() : StepFunction(zero(unit_space)) {}

  static StepFunction zero(MeasureSpace space);
  static StepFunction constant(MeasureSpace space, double value);
  // value * indicator of [lo, hi)
  static StepFunction indicator(MeasureSpace space, double lo, double hi,
                                double value = 1.0);
  static StepFunction from_breakpoints(MeasureSpace space,
                                       std::vector<double> breakpoints,
                                       std::vector<double> values,
                                       double tail = 0.0,
                                       bool sup_only = false);
  // Values on the uniform grid of `cell_values.size()` cells of the given
  // width starting at 0; cell k spans [k*w, (k+1)*w).
  static StepFunction on_grid(MeasureSpace space,
                              std::span<const double> cell_values,
                              double cell_width);

  const MeasureSpace& space() const { return space_; }
  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const double> values() const { return values_; }
  double tail() const { return tail_; }
  bool sup_only() const { return sup_only_; }

  // End of the explicit breakpoint list (t_m); the tail starts here.
  double support_end() const { return breakpoints_.back(); }
  std::size_t piece_count() const { return values_.size(); }

  // Right-continuous evaluation at t in [0, alpha).
  double operator()(double t) const;

  // Explicit pieces; on [0,1) the trailing segment [t_m, 1) is included
  // whenever it is nonempty, so the pieces tile all of I.
  std::vector<Piece> pieces() const;

  // True when the function is its own decreasing rearrangement:
  // nonnegative, nonincreasing, zero tail.
  bool is_decreasing_canonical() const;

  bool operator==(const StepFunction&) const = default;

 private:
  StepFunction(MeasureSpace space, std::vector<double> bp,
               std::vector<double> vals, double tail, bool sup_only);

  MeasureSpace space_;
  std::vector<double> breakpoints_;  // t_0 = 0 < t_1 < ... < t_m
  std::vector<double> values_;       // value on [t_{k-1}, t_k)
  double tail_ = 0.0;                // value on [t_m, alpha)
  bool sup_only_ = false;
};

// Piecewise-linear F with F(0) = 0, nondecreasing and concave; the nodes
// are (t_k, F(t_k)) and the last segment extends with `final_slope`.
// Slopes are stored rather than recomputed so evaluation reproduces the
// accumulation bits.
class CumulativeProfile {
 public:
  CumulativeProfile(std::vector<double> ts, std::vector<double> Fs,
                    std::vector<double> slopes, double final_slope);

  double operator()(double t) const;  // t >= 0
  std::span<const double> node_abscissae() const { return ts_; }
  std::span<const double> node_values() const { return Fs_; }
  std::span<const double> node_slopes() const { return slopes_; }
  double final_slope() const { return final_slope_; }
  double total() const { return Fs_.back(); }

  // Verification helper: nondecreasing values, nonincreasing slopes.
  bool is_concave_nondecreasing() const;

 private:
  std::vector<double> ts_, Fs_, slopes_;
  double final_slope_;
};

// Exact representation of the maximal function t -> (1/t) integral_0^t x*:
// on each segment (lo, hi] it equals a + c/t.
class MaximalProfile {
 public:
  struct Segment {
    double lo, hi;  // hi may be +inf on the last segment
    double a, c;    // value at t in (lo, hi] is a + c/t
  };

  explicit MaximalProfile(std::vector<Segment> segments);

  double operator()(double t) const;  // t > 0
  std::span<const Segment> segments() const { return segments_; }

 private:
  std::vector<Segment> segments_;
};

// --- Operations ------------------------------------------------------------

// mu{ |x| > level }; may be +inf only on the half line for sup-only
// functions with |tail| > level.
double distribution(const StepFunction& x, double level);

// Decreasing rearrangement of |x|.  Stable descending sort of the pieces
// with left-to-right breakpoint accumulation; idempotent (bitwise) on
// already canonical-decreasing input.  Rejects half-line input with a
// nonzero tail.
StepFunction rearrange(const StepFunction& x);

CumulativeProfile cumulative_profile(const StepFunction& x);
MaximalProfile maximal_profile(const StepFunction& x);

// --- Pointwise arithmetic ---------------------------------------------------

StepFunction add(const StepFunction& x, const StepFunction& y);
StepFunction subtract(const StepFunction& x, const StepFunction& y);
StepFunction scale(double c, const StepFunction& x);
StepFunction abs_value(const StepFunction& x);
StepFunction min_with_constant(const StepFunction& x, double c);
// x restricted to a finite union of intervals (intersected with I).
StepFunction restrict_to(const StepFunction& x,
                         std::span<const Interval> set);
// x restricted to the complement of the given disjoint intervals.
StepFunction restrict_complement(const StepFunction& x,
                                 std::span<const Interval> set);

// True when x <= y pointwise everywhere on I.
bool pointwise_leq(const StepFunction& x, const StepFunction& y,
                   double tol = 0.0);
// max_t |x(t) - y(t)|
double sup_distance(const StepFunction& x, const StepFunction& y);

}  // namespace rik
