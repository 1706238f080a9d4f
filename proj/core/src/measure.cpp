#include "rik/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rik {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// Pieces with |value| > 0 in stable descending |value| order.  Both
// distribution() and rearrange() enumerate pieces through this helper so
// their length sums share one summation order and agree bitwise.
std::vector<Piece> sorted_support_pieces(const StepFunction& x) {
  std::vector<Piece> ps = x.pieces();
  std::erase_if(ps, [](const Piece& p) { return p.value == 0.0; });
  std::ranges::stable_sort(ps, [](const Piece& a, const Piece& b) {
    return std::abs(a.value) > std::abs(b.value);
  });
  return ps;
}

}  // namespace

double MeasureSpace::length() const { return finite() ? 1.0 : kInf; }

// --- StepFunction ------------------------------------------------------------

StepFunction::StepFunction(MeasureSpace space, std::vector<double> bp,
                           std::vector<double> vals, double tail,
                           bool sup_only)
    : space_(space),
      breakpoints_(std::move(bp)),
      values_(std::move(vals)),
      tail_(tail),
      sup_only_(sup_only) {}

StepFunction StepFunction::zero(MeasureSpace space) {
  return StepFunction(space, {0.0}, {}, 0.0, false);
}

StepFunction StepFunction::constant(MeasureSpace space, double value) {
  return from_breakpoints(space, {0.0}, {}, value,
                          !space.finite() && value != 0.0);
}

StepFunction StepFunction::indicator(MeasureSpace space, double lo, double hi,
                                     double value) {
  require(lo >= 0.0 && hi > lo, "indicator: need 0 <= lo < hi");
  if (space.finite()) require(hi <= 1.0, "indicator: hi > 1 on [0,1)");
  std::vector<double> bp{0.0};
  std::vector<double> vals;
  if (lo > 0.0) {
    bp.push_back(lo);
    vals.push_back(0.0);
  }
  bp.push_back(hi);
  vals.push_back(value);
  return from_breakpoints(space, std::move(bp), std::move(vals), 0.0);
}

StepFunction StepFunction::from_breakpoints(MeasureSpace space,
                                            std::vector<double> breakpoints,
                                            std::vector<double> values,
                                            double tail, bool sup_only) {
  require(!breakpoints.empty() && breakpoints.front() == 0.0,
          "StepFunction: breakpoints must start at 0");
  require(values.size() + 1 == breakpoints.size(),
          "StepFunction: need one value per interval between breakpoints");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    require(std::isfinite(breakpoints[i]) &&
                breakpoints[i] > breakpoints[i - 1],
            "StepFunction: breakpoints must increase strictly");
  for (double v : values)
    require(std::isfinite(v), "StepFunction: values must be finite");
  require(std::isfinite(tail), "StepFunction: tail must be finite");
  if (space.finite()) {
    require(breakpoints.back() <= 1.0, "StepFunction: breakpoint beyond 1");
    // [t_m, 1) empty: fold the last piece value into the tail.
    if (breakpoints.back() == 1.0) {
      tail = values.back();
      breakpoints.pop_back();
      values.pop_back();
    }
  } else if (tail != 0.0) {
    require(sup_only,
            "StepFunction: nonzero tail on [0,inf) requires the sup-only "
            "flag");
  }
  // The flag only records that a nonzero half-line tail is intentional.
  sup_only = !space.finite() && tail != 0.0;

  // Merge adjacent equal values by dropping interior breakpoints; the
  // retained breakpoints keep their original bits.
  std::vector<double> bp{breakpoints[0]};
  std::vector<double> vv;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!vv.empty() && vv.back() == values[i]) {
      bp.back() = breakpoints[i + 1];
    } else {
      vv.push_back(values[i]);
      bp.push_back(breakpoints[i + 1]);
    }
  }
  while (!vv.empty() && vv.back() == tail) {
    vv.pop_back();
    bp.pop_back();
  }
  return StepFunction(space, std::move(bp), std::move(vv), tail, sup_only);
}

StepFunction StepFunction::on_grid(MeasureSpace space,
                                   std::span<const double> cell_values,
                                   double cell_width) {
  require(cell_width > 0.0, "on_grid: cell width must be positive");
  const std::size_t n = cell_values.size();
  require(n > 0, "on_grid: need at least one cell");
  std::vector<double> bp(n + 1);
  for (std::size_t k = 0; k <= n; ++k)
    bp[k] = static_cast<double>(k) * cell_width;
  if (space.finite() && bp.back() > 1.0) {
    require(std::abs(bp.back() - 1.0) < 1e-12, "on_grid: grid exceeds [0,1)");
    bp.back() = 1.0;
  }
  return from_breakpoints(space, std::move(bp),
                          {cell_values.begin(), cell_values.end()});
}

double StepFunction::operator()(double t) const {
  require(t >= 0.0, "StepFunction: evaluation at t < 0");
  if (space_.finite()) require(t < 1.0, "StepFunction: evaluation at t >= 1");
  // First breakpoint strictly greater than t identifies the piece.
  auto it = std::ranges::upper_bound(breakpoints_, t);
  if (it == breakpoints_.end()) return tail_;
  std::size_t idx = static_cast<std::size_t>(it - breakpoints_.begin());
  return values_[idx - 1];
}

std::vector<Piece> StepFunction::pieces() const {
  std::vector<Piece> ps;
  ps.reserve(values_.size() + 1);
  for (std::size_t i = 0; i < values_.size(); ++i)
    ps.push_back({breakpoints_[i], breakpoints_[i + 1], values_[i]});
  if (space_.finite() && breakpoints_.back() < 1.0)
    ps.push_back({breakpoints_.back(), 1.0, tail_});
  return ps;
}

bool StepFunction::is_decreasing_canonical() const {
  if (sup_only_ || tail_ != 0.0) return false;
  double prev = kInf;
  for (double v : values_) {
    if (v <= 0.0 || v >= prev) return false;
    prev = v;
  }
  return true;
}

// --- distribution / rearrangement -------------------------------------------

double distribution(const StepFunction& x, double level) {
  require(level >= 0.0, "distribution: level must be >= 0");
  if (!x.space().finite() && std::abs(x.tail()) > level) return kInf;
  double acc = 0.0;
  for (const Piece& p : sorted_support_pieces(x)) {
    if (std::abs(p.value) > level) acc += p.hi - p.lo;
  }
  // Reordered length sums may overshoot the space measure by a final ulp;
  // the cap keeps them consistent with the rearranged breakpoints.
  if (x.space().finite()) acc = std::min(acc, 1.0);
  return acc;
}

StepFunction rearrange(const StepFunction& x) {
  if (!x.space().finite() && x.tail() != 0.0)
    throw std::domain_error(
        "rearrange: half-line function with nonzero tail has no step-function "
        "rearrangement (sup-only data)");
  if (x.is_decreasing_canonical()) return x;

  std::vector<double> bp{0.0};
  std::vector<double> vals;
  double acc = 0.0;
  for (const Piece& p : sorted_support_pieces(x)) {
    const double v = std::abs(p.value);
    acc += p.hi - p.lo;
    if (!vals.empty() && vals.back() == v) {
      bp.back() = acc;  // extend the run; acc keeps the running-sum bits
    } else {
      vals.push_back(v);
      bp.push_back(acc);
    }
  }
  // The reordered sum may overshoot the space measure by one final ulp;
  // distribution() caps its totals the same way.
  if (x.space().finite() && bp.back() > 1.0) bp.back() = 1.0;
  return StepFunction::from_breakpoints(x.space(), std::move(bp),
                                        std::move(vals));
}

// --- profiles ----------------------------------------------------------------

CumulativeProfile::CumulativeProfile(std::vector<double> ts,
                                     std::vector<double> Fs,
                                     std::vector<double> slopes,
                                     double final_slope)
    : ts_(std::move(ts)),
      Fs_(std::move(Fs)),
      slopes_(std::move(slopes)),
      final_slope_(final_slope) {}

double CumulativeProfile::operator()(double t) const {
  require(t >= 0.0, "CumulativeProfile: t < 0");
  auto it = std::ranges::lower_bound(ts_, t);
  if (it != ts_.end() && *it == t)
    return Fs_[static_cast<std::size_t>(it - ts_.begin())];
  if (it == ts_.end()) return Fs_.back() + final_slope_ * (t - ts_.back());
  std::size_t seg = static_cast<std::size_t>(it - ts_.begin()) - 1;
  return Fs_[seg] + slopes_[seg] * (t - ts_[seg]);
}

bool CumulativeProfile::is_concave_nondecreasing() const {
  for (std::size_t i = 1; i < Fs_.size(); ++i)
    if (Fs_[i] < Fs_[i - 1]) return false;
  for (std::size_t i = 1; i < slopes_.size(); ++i)
    if (slopes_[i] > slopes_[i - 1]) return false;
  if (!slopes_.empty() && final_slope_ > slopes_.back()) return false;
  return final_slope_ >= 0.0;
}

CumulativeProfile cumulative_profile(const StepFunction& x) {
  const StepFunction r = rearrange(x);
  std::vector<double> ts{0.0}, Fs{0.0}, slopes;
  double acc = 0.0;
  auto push = [&](double hi, double v) {
    acc += v * (hi - ts.back());
    slopes.push_back(v);
    ts.push_back(hi);
    Fs.push_back(acc);
  };
  for (std::size_t i = 0; i < r.piece_count(); ++i)
    push(r.breakpoints()[i + 1], r.values()[i]);
  // Constant functions on [0,1) canonicalize into the tail; their mass
  // still ends at t = 1.
  if (r.space().finite() && r.tail() != 0.0) push(1.0, r.tail());
  return CumulativeProfile(std::move(ts), std::move(Fs), std::move(slopes),
                           0.0);
}

MaximalProfile::MaximalProfile(std::vector<Segment> segments)
    : segments_(std::move(segments)) {}

double MaximalProfile::operator()(double t) const {
  require(t > 0.0, "maximal function: defined for t > 0 only");
  for (const Segment& s : segments_)
    if (t <= s.hi) return s.a + s.c / t;
  const Segment& last = segments_.back();
  return last.a + last.c / t;
}

MaximalProfile maximal_profile(const StepFunction& x) {
  const CumulativeProfile F = cumulative_profile(x);
  auto ts = F.node_abscissae();
  auto Fs = F.node_values();
  auto slopes = F.node_slopes();
  std::vector<MaximalProfile::Segment> segs;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double slope = slopes[i];
    segs.push_back({ts[i], ts[i + 1], slope, Fs[i] - slope * ts[i]});
  }
  segs.push_back({ts.back(), kInf, F.final_slope(),
                  Fs.back() - F.final_slope() * ts.back()});
  return MaximalProfile(std::move(segs));
}

// --- pointwise arithmetic -----------------------------------------------------

namespace {

// Merge the breakpoint sets and apply `op` to the pair of piece values on
// every gap, plus the tails.
template <typename Op>
StepFunction merge_walk(const StepFunction& x, const StepFunction& y, Op op) {
  require(x.space() == y.space(), "pointwise op: mismatched measure spaces");
  std::vector<double> bp(x.breakpoints().begin(), x.breakpoints().end());
  bp.insert(bp.end(), y.breakpoints().begin(), y.breakpoints().end());
  std::ranges::sort(bp);
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

  auto value_at = [](const StepFunction& f, double t) {
    auto bps = f.breakpoints();
    auto it = std::ranges::upper_bound(bps, t);
    if (it == bps.end()) return f.tail();
    return f.values()[static_cast<std::size_t>(it - bps.begin()) - 1];
  };

  std::vector<double> vals;
  vals.reserve(bp.size());
  for (std::size_t i = 0; i + 1 < bp.size(); ++i)
    vals.push_back(op(value_at(x, bp[i]), value_at(y, bp[i])));
  const double tail = op(x.tail(), y.tail());
  return StepFunction::from_breakpoints(x.space(), std::move(bp),
                                        std::move(vals), tail,
                                        x.sup_only() || y.sup_only());
}

template <typename Op>
StepFunction map_values(const StepFunction& x, Op op, bool sup_only) {
  std::vector<double> vals(x.values().begin(), x.values().end());
  for (double& v : vals) v = op(v);
  return StepFunction::from_breakpoints(
      x.space(), {x.breakpoints().begin(), x.breakpoints().end()},
      std::move(vals), op(x.tail()), sup_only);
}

}  // namespace

StepFunction add(const StepFunction& x, const StepFunction& y) {
  return merge_walk(x, y, [](double a, double b) { return a + b; });
}

StepFunction subtract(const StepFunction& x, const StepFunction& y) {
  return merge_walk(x, y, [](double a, double b) { return a - b; });
}

StepFunction scale(double c, const StepFunction& x) {
  require(std::isfinite(c), "scale: factor must be finite");
  return map_values(x, [c](double v) { return c * v; }, x.sup_only());
}

StepFunction abs_value(const StepFunction& x) {
  return map_values(x, [](double v) { return std::abs(v); }, x.sup_only());
}

StepFunction min_with_constant(const StepFunction& x, double c) {
  require(std::isfinite(c), "min_with_constant: constant must be finite");
  return map_values(x, [c](double v) { return std::min(v, c); },
                    x.sup_only());
}

StepFunction restrict_to(const StepFunction& x, std::span<const Interval> set) {
  for (const Interval& iv : set)
    require(iv.hi > iv.lo && iv.lo >= 0.0, "restrict: bad interval");
  std::vector<Interval> ivs(set.begin(), set.end());
  std::ranges::sort(ivs, {}, &Interval::lo);
  for (std::size_t i = 1; i < ivs.size(); ++i)
    require(ivs[i].lo >= ivs[i - 1].hi, "restrict: intervals must be disjoint");

  // Indicator of the set as a step function, then pointwise multiply.
  std::vector<double> bp{0.0};
  std::vector<double> vals;
  double tail = 0.0;
  const double cap = x.space().finite() ? 1.0 : kInf;
  for (const Interval& iv : ivs) {
    const double lo = iv.lo, hi = std::min(iv.hi, cap);
    if (lo >= cap || hi <= lo) continue;
    if (lo > bp.back()) {
      bp.push_back(lo);
      vals.push_back(0.0);
    }
    if (hi < cap) {
      bp.push_back(hi);
      vals.push_back(1.0);
    } else {
      tail = 1.0;
    }
  }
  auto chi = StepFunction::from_breakpoints(
      x.space(), std::move(bp), std::move(vals), tail,
      !x.space().finite() && tail != 0.0);
  return merge_walk(x, chi, [](double a, double b) { return a * b; });
}

StepFunction restrict_complement(const StepFunction& x,
                                 std::span<const Interval> set) {
  std::vector<Interval> ivs(set.begin(), set.end());
  std::ranges::sort(ivs, {}, &Interval::lo);
  std::vector<Interval> comp;
  double cursor = 0.0;
  for (const Interval& iv : ivs) {
    if (iv.lo > cursor) comp.push_back({cursor, iv.lo});
    cursor = std::max(cursor, iv.hi);
  }
  const double end =
      x.space().finite() ? 1.0 : std::max(cursor, x.support_end());
  if (end > cursor) comp.push_back({cursor, end});
  if (comp.empty()) return StepFunction::zero(x.space());
  return restrict_to(x, comp);
}

bool pointwise_leq(const StepFunction& x, const StepFunction& y, double tol) {
  const StepFunction d = subtract(x, y);
  for (double v : d.values())
    if (v > tol) return false;
  return d.tail() <= tol;
}

double sup_distance(const StepFunction& x, const StepFunction& y) {
  const StepFunction d = subtract(x, y);
  double m = std::abs(d.tail());
  for (double v : d.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace rik
