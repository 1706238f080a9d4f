#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rik/measure.hpp"

// Symmetric-space norms over the couple (L1, Linf) as a closed plugin set:
// L1, Linf, L1+Linf, Lp, and the two Marcinkiewicz scales built on a
// quasiconcave weight.  Every rearrangement-based variant is evaluated on
// the decreasing rearrangement, which makes norm symmetry bit-exact.

namespace rik {

// phi with phi(0) = 0, positive, nondecreasing, phi(t)/t nonincreasing.
// Either t^a with a in [0,1] or a table interpolated linearly (anchored at
// the origin, constant beyond the last node).
class QuasiconcavePhi {
 public:
  static QuasiconcavePhi power(double a);
  static QuasiconcavePhi table(std::vector<double> ts, std::vector<double> vs);

  bool is_power() const { return table_ts_.empty(); }
  double exponent() const { return a_; }
  std::span<const double> table_abscissae() const { return table_ts_; }
  std::span<const double> table_values() const { return table_vs_; }

  double operator()(double t) const;  // t >= 0

  bool operator==(const QuasiconcavePhi&) const = default;

 private:
  QuasiconcavePhi() = default;
  double a_ = 1.0;
  std::vector<double> table_ts_, table_vs_;
};

enum class NormVariant { L1, LInf, L1PlusLInf, Lp, MarcinkiewiczStar,
                         Marcinkiewicz };

struct NormSpec {
  NormVariant variant = NormVariant::L1;
  double p = 2.0;                      // for Lp, p in (1, inf)
  std::optional<QuasiconcavePhi> phi;  // for the Marcinkiewicz variants

  static NormSpec l1() { return {NormVariant::L1, 2.0, {}}; }
  static NormSpec linf() { return {NormVariant::LInf, 2.0, {}}; }
  static NormSpec l1_plus_linf() { return {NormVariant::L1PlusLInf, 2.0, {}}; }
  static NormSpec lp(double p);
  static NormSpec marcinkiewicz_star(QuasiconcavePhi phi);
  static NormSpec marcinkiewicz(QuasiconcavePhi phi);

  std::string name() const;
  bool operator==(const NormSpec&) const = default;
};

// May return +inf (e.g. L1 of a sup-only half-line function).
double norm(const NormSpec& spec, const StepFunction& x);

// phi_E(t) = norm of the indicator of [0, t); realized on the half line so
// any t > 0 is admissible.
double fundamental_function(const NormSpec& spec, double t);

struct QuasiconcaveReport {
  bool ok = true;
  std::optional<double> violation_t;
  std::string which;  // "increasing" or "ratio"
};

// Verifies phi nondecreasing and phi(t)/t nonincreasing on a geometric
// probe grid spanning [1e-6, 1e6] (plus the table nodes).
QuasiconcaveReport quasiconcave_check(const QuasiconcavePhi& phi, int probes);

struct IukmLimit {
  enum class Verdict { zero, positive, divergent };
  Verdict verdict = Verdict::zero;
  double c = 0.0;  // the limit, for the positive verdict

  bool operator==(const IukmLimit&) const = default;
};

// lim_{t->0+} t / phi_E(t): analytic for the power-type fundamental
// functions, estimated along t = 2^-k, k = 1..40, for tables.
IukmLimit iukm_limit(const NormSpec& spec);

}  // namespace rik
