#include "rik/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rik {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

// --- QuasiconcavePhi ----------------------------------------------------------

QuasiconcavePhi QuasiconcavePhi::power(double a) {
  require(a >= 0.0 && a <= 1.0, "phi: power exponent must lie in [0,1]");
  QuasiconcavePhi phi;
  phi.a_ = a;
  return phi;
}

QuasiconcavePhi QuasiconcavePhi::table(std::vector<double> ts,
                                       std::vector<double> vs) {
  require(!ts.empty() && ts.size() == vs.size(),
          "phi: table needs matching nonempty abscissae/values");
  require(ts.front() > 0.0, "phi: table abscissae must be positive");
  for (std::size_t i = 1; i < ts.size(); ++i)
    require(ts[i] > ts[i - 1], "phi: table abscissae must increase");
  for (double v : vs) require(v > 0.0, "phi: table values must be positive");
  QuasiconcavePhi phi;
  phi.table_ts_ = std::move(ts);
  phi.table_vs_ = std::move(vs);
  return phi;
}

double QuasiconcavePhi::operator()(double t) const {
  require(t >= 0.0, "phi: t < 0");
  if (t == 0.0) return 0.0;
  if (is_power()) {
    if (t == kInf) return a_ == 0.0 ? 1.0 : kInf;
    return std::pow(t, a_);
  }
  if (t >= table_ts_.back()) return table_vs_.back();
  // Linear through the origin before the first node, interpolated after.
  auto it = std::ranges::lower_bound(table_ts_, t);
  std::size_t hi = static_cast<std::size_t>(it - table_ts_.begin());
  if (table_ts_[hi] == t) return table_vs_[hi];
  const double t0 = hi == 0 ? 0.0 : table_ts_[hi - 1];
  const double v0 = hi == 0 ? 0.0 : table_vs_[hi - 1];
  const double t1 = table_ts_[hi], v1 = table_vs_[hi];
  return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
}

// --- NormSpec ----------------------------------------------------------------

NormSpec NormSpec::lp(double p) {
  require(p > 1.0 && std::isfinite(p), "Lp: p must lie in (1, inf)");
  NormSpec s;
  s.variant = NormVariant::Lp;
  s.p = p;
  return s;
}

NormSpec NormSpec::marcinkiewicz_star(QuasiconcavePhi phi) {
  NormSpec s;
  s.variant = NormVariant::MarcinkiewiczStar;
  s.phi = std::move(phi);
  return s;
}

NormSpec NormSpec::marcinkiewicz(QuasiconcavePhi phi) {
  NormSpec s;
  s.variant = NormVariant::Marcinkiewicz;
  s.phi = std::move(phi);
  return s;
}

std::string NormSpec::name() const {
  switch (variant) {
    case NormVariant::L1: return "L1";
    case NormVariant::LInf: return "LInf";
    case NormVariant::L1PlusLInf: return "L1+LInf";
    case NormVariant::Lp: return "Lp(" + std::to_string(p) + ")";
    case NormVariant::MarcinkiewiczStar: return "Mstar";
    case NormVariant::Marcinkiewicz: return "M";
  }
  return "?";
}

// --- norms -------------------------------------------------------------------

namespace {

double sup_norm(const StepFunction& x) {
  double m = std::abs(x.tail());
  for (double v : x.values()) m = std::max(m, std::abs(v));
  return m;
}

// sup over pieces of x* of value * phi(right endpoint); phi is
// nondecreasing and x* right-continuous, so per piece the sup sits at the
// right end.
double mstar_norm(const QuasiconcavePhi& phi, const StepFunction& r) {
  double m = 0.0;
  for (const Piece& p : r.pieces())
    if (p.value != 0.0) m = std::max(m, p.value * phi(p.hi));
  if (!r.space().finite() && r.tail() != 0.0) m = kInf;  // unreachable: tail=0
  return m;
}

// sup of (a + c/t) * phi(t) over one maximal-function segment.
double segment_sup_power(double a, double c, double theta, double lo,
                         double hi) {
  auto h = [&](double t) {
    return (a + c / t) * std::pow(t, theta);
  };
  double m = 0.0;
  if (lo > 0.0) m = std::max(m, h(lo));
  if (hi != kInf) {
    m = std::max(m, h(hi));
  } else {
    if (a > 0.0 && theta > 0.0) return kInf;
    if (theta == 1.0) m = std::max(m, c);  // c/t * t beyond the profile
  }
  if (lo == 0.0 && theta == 0.0) m = std::max(m, a);  // limit at 0+ (c = 0)
  if (a > 0.0 && c > 0.0 && theta > 0.0 && theta < 1.0) {
    const double tc = c * (1.0 - theta) / (a * theta);
    if (tc > lo && tc < hi) m = std::max(m, h(tc));
  }
  return m;
}

// Same on a phi-linear window [u0, u1] with phi(t) = p + q t.
double segment_sup_linear(double a, double c, double p, double q, double u0,
                          double u1) {
  auto h = [&](double t) { return (a + c / t) * (p + q * t); };
  double m = 0.0;
  if (u0 > 0.0) m = std::max(m, h(u0));
  if (u1 != kInf) {
    m = std::max(m, h(u1));
  } else {
    if (q > 0.0 && a > 0.0) return kInf;
    if (q > 0.0 && a == 0.0) m = std::max(m, c * q);  // c/t * qt -> cq
    // q == 0: h decreases toward a*p, dominated by h(u0).
  }
  if (u0 == 0.0 && c == 0.0) m = std::max(m, a * p);  // limit at 0+
  if (a * q > 0.0 && c * p > 0.0) {
    const double tc = std::sqrt(c * p / (a * q));
    if (tc > u0 && (u1 == kInf || tc < u1)) m = std::max(m, h(tc));
  }
  return m;
}

double marcinkiewicz_norm(const QuasiconcavePhi& phi, const StepFunction& x) {
  const MaximalProfile xx = maximal_profile(x);
  double m = 0.0;
  for (const auto& seg : xx.segments()) {
    if (seg.a == 0.0 && seg.c == 0.0) continue;
    if (phi.is_power()) {
      m = std::max(m, segment_sup_power(seg.a, seg.c, phi.exponent(), seg.lo,
                                        seg.hi));
      continue;
    }
    // Split the segment at the phi table nodes.
    auto ts = phi.table_abscissae();
    double u0 = seg.lo;
    auto windows_value = [&](double lo, double hi) {
      // phi is linear on [lo, hi]: recover p + q t from the endpoints.
      double t0 = lo, t1 = hi;
      if (t1 == kInf) t1 = std::max(ts.back(), lo) + 1.0;
      const double f0 = phi(t0), f1 = phi(t1);
      const double q = t1 > t0 ? (f1 - f0) / (t1 - t0) : 0.0;
      const double p = f0 - q * t0;
      m = std::max(m, segment_sup_linear(seg.a, seg.c, p, q, lo, hi));
    };
    for (double node : ts) {
      if (node <= u0) continue;
      if (seg.hi != kInf && node >= seg.hi) break;
      windows_value(u0, node);
      u0 = node;
    }
    windows_value(u0, seg.hi);
  }
  return m;
}

}  // namespace

double norm(const NormSpec& spec, const StepFunction& x) {
  switch (spec.variant) {
    case NormVariant::LInf:
      return sup_norm(x);
    case NormVariant::L1: {
      if (!x.space().finite() && x.tail() != 0.0) return kInf;
      return cumulative_profile(x).total();
    }
    case NormVariant::L1PlusLInf:
      return cumulative_profile(x)(1.0);
    case NormVariant::Lp: {
      if (!x.space().finite() && x.tail() != 0.0) return kInf;
      const StepFunction r = rearrange(x);
      double s = 0.0;
      for (const Piece& p : r.pieces())
        if (p.value != 0.0) s += std::pow(p.value, spec.p) * (p.hi - p.lo);
      return std::pow(s, 1.0 / spec.p);
    }
    case NormVariant::MarcinkiewiczStar:
      return mstar_norm(*spec.phi, rearrange(x));
    case NormVariant::Marcinkiewicz:
      return marcinkiewicz_norm(*spec.phi, x);
  }
  return 0.0;
}

double fundamental_function(const NormSpec& spec, double t) {
  require(t > 0.0, "fundamental_function: t must be positive");
  return norm(spec, StepFunction::indicator(halfline_space, 0.0, t));
}

// --- quasiconcavity ------------------------------------------------------------

QuasiconcaveReport quasiconcave_check(const QuasiconcavePhi& phi, int probes) {
  require(probes >= 2, "quasiconcave_check: need at least two probes");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(probes) + 8);
  const double lo = 1e-6, hi = 1e6;
  const double ratio = std::pow(hi / lo, 1.0 / (probes - 1));
  double t = lo;
  for (int i = 0; i < probes; ++i, t *= ratio) grid.push_back(t);
  for (double node : phi.table_abscissae()) grid.push_back(node);
  std::ranges::sort(grid);
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  QuasiconcaveReport rep;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double t0 = grid[i - 1], t1 = grid[i];
    const double f0 = phi(t0), f1 = phi(t1);
    if (f1 < f0) {
      rep.ok = false;
      rep.violation_t = t1;
      rep.which = "increasing";
      return rep;
    }
    if (f1 / t1 > f0 / t0 * (1.0 + 1e-12)) {
      rep.ok = false;
      rep.violation_t = t1;
      rep.which = "ratio";
      return rep;
    }
  }
  if (phi(grid.front()) <= 0.0) {
    rep.ok = false;
    rep.violation_t = grid.front();
    rep.which = "positivity";
  }
  return rep;
}

// --- the t / phi_E(t) limit ------------------------------------------------------

namespace {

IukmLimit analytic_limit_for_power(double a) {
  // t / t^a = t^{1-a}
  if (a == 1.0) return {IukmLimit::Verdict::positive, 1.0};
  return {IukmLimit::Verdict::zero, 0.0};
}

IukmLimit dyadic_probe_limit(const NormSpec& spec) {
  // t/phi_E(t) is nondecreasing in t for genuine quasiconcave phi, so the
  // dyadic sequence decreases toward the limit.
  std::vector<double> r;
  for (int k = 1; k <= 40; ++k) {
    const double t = std::ldexp(1.0, -k);
    r.push_back(t / fundamental_function(spec, t));
  }
  const double last = r.back();
  bool stable = true;
  for (std::size_t i = r.size() - 5; i < r.size(); ++i) {
    const double rel = std::abs(r[i] - last) /
                       std::max(std::abs(last), 1e-300);
    if (rel > 1e-6) stable = false;
  }
  if (stable && last > 1e-12) return {IukmLimit::Verdict::positive, last};
  if (last <= 1e-12) return {IukmLimit::Verdict::zero, 0.0};
  return {IukmLimit::Verdict::divergent, last};
}

}  // namespace

IukmLimit iukm_limit(const NormSpec& spec) {
  switch (spec.variant) {
    case NormVariant::L1:
      return {IukmLimit::Verdict::positive, 1.0};  // phi(t) = t
    case NormVariant::L1PlusLInf:
      return {IukmLimit::Verdict::positive, 1.0};  // phi(t) = min(t, 1)
    case NormVariant::LInf:
      return {IukmLimit::Verdict::zero, 0.0};  // phi(t) = 1
    case NormVariant::Lp:
      return {IukmLimit::Verdict::zero, 0.0};  // t^{1-1/p} -> 0
    case NormVariant::MarcinkiewiczStar:
    case NormVariant::Marcinkiewicz:
      if (spec.phi->is_power())
        return analytic_limit_for_power(spec.phi->exponent());
      return dyadic_probe_limit(spec);
  }
  return {IukmLimit::Verdict::zero, 0.0};
}

}  // namespace rik
