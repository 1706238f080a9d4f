#include "rik/interpolation.hpp"

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

// Adaptive Simpson with the usual Richardson error estimate.
double adaptive_simpson(const auto& f, double a, double b, double fa,
                        double fb, double fm, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double refined = left + right;
  const double err = (refined - whole) / 15.0;
  if (depth <= 0 || std::abs(err) <= tol) return refined + err;
  return adaptive_simpson(f, a, m, fa, fm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, fb, frm, right, 0.5 * tol, depth - 1);
}

double integrate(const auto& f, double a, double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fb, fm, whole, tol, 48);
}

// integral of t^e over [lo, hi], hi finite, assuming convergence.
double power_integral(double e, double lo, double hi) {
  if (e == -1.0) return std::log(hi) - std::log(lo);
  const double p = e + 1.0;
  const double hip = std::pow(hi, p);
  const double lop = lo == 0.0 ? 0.0 : std::pow(lo, p);
  return (hip - lop) / p;
}

}  // namespace

double KProfile::operator()(double t) const {
  require(t > 0.0, "K(t, x): t must be positive");
  return profile_(t);
}

double k_functional(double t, const StepFunction& x) {
  require(t > 0.0, "k_functional: t must be positive");
  return cumulative_profile(x)(t);
}

KProfile k_profile(const StepFunction& x) {
  return KProfile(cumulative_profile(x));
}

// --- Phi_{theta,q} -------------------------------------------------------------

namespace {

// One linear window [lo, hi] of K(t) = a + b t, contributing
// integral (a + b t)^q t^{-theta q - 1} dt.
double window_integral(double a, double b, double q, double theta, double lo,
                       double hi) {
  if (q == 1.0) {
    return a * power_integral(-theta - 1.0, lo, hi) +
           b * power_integral(-theta, lo, hi);
  }
  if (q == 2.0) {
    return a * a * power_integral(-2.0 * theta - 1.0, lo, hi) +
           2.0 * a * b * power_integral(-2.0 * theta, lo, hi) +
           b * b * power_integral(1.0 - 2.0 * theta, lo, hi);
  }
  auto f = [&](double t) {
    return std::pow(a + b * t, q) * std::pow(t, -theta * q - 1.0);
  };
  const double scale = std::max(std::abs(f(lo)), std::abs(f(hi)));
  const double tol = std::max(scale * (hi - lo), 1e-30) * 1e-9;
  return integrate(f, lo, hi, tol);
}

double sup_form(const CumulativeProfile& K, double theta) {
  auto ts = K.node_abscissae();
  auto Fs = K.node_values();
  auto slopes = K.node_slopes();
  double m = 0.0;
  auto h = [&](double t, double a, double b) {
    return (a + b * t) * std::pow(t, -theta);
  };
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double b = slopes[i];
    const double a = Fs[i] - b * ts[i];
    const double lo = ts[i], hi = ts[i + 1];
    if (lo > 0.0) m = std::max(m, h(lo, a, b));
    m = std::max(m, h(hi, a, b));
    if (lo == 0.0 && theta == 1.0) m = std::max(m, b);  // K/t -> slope
    if (a > 0.0 && b > 0.0 && theta > 0.0 && theta < 1.0) {
      const double tc = a * theta / (b * (1.0 - theta));
      if (tc > lo && tc < hi) m = std::max(m, h(tc, a, b));
    }
  }
  // Beyond the last node K is constant (zero final slope).
  const double FK = Fs.back();
  if (FK > 0.0) {
    if (theta == 0.0) m = std::max(m, FK);
    else if (ts.back() > 0.0) m = std::max(m, FK * std::pow(ts.back(), -theta));
  }
  return m;
}

}  // namespace

PhiResult phi_theta_q(const KProfile& profile, double theta, double q) {
  require(theta >= 0.0 && theta <= 1.0, "phi_theta_q: theta must be in [0,1]");
  require(q >= 1.0, "phi_theta_q: q must be in [1, inf]");
  const CumulativeProfile& K = profile.profile();
  require(K.final_slope() == 0.0,
          "phi_theta_q: K profile must be eventually constant");

  if (K.total() == 0.0) return {true, 0.0, PhiResult::Divergence::none};

  if (q == kInf) return {true, sup_form(K, theta), PhiResult::Divergence::none};

  // (t^-theta * b t)^q / t near zero and (t^-theta * F)^q / t at infinity.
  if (theta == 1.0) return {false, kInf, PhiResult::Divergence::at_zero};
  if (theta == 0.0) return {false, kInf, PhiResult::Divergence::at_infinity};

  auto ts = K.node_abscissae();
  auto Fs = K.node_values();
  auto slopes = K.node_slopes();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double b = slopes[i];
    const double a = Fs[i] - b * ts[i];
    if (ts[i] == 0.0) {
      // Pure power piece: (b t)^q t^{-theta q - 1}.
      acc += std::pow(b, q) * std::pow(ts[i + 1], q * (1.0 - theta)) /
             (q * (1.0 - theta));
    } else {
      acc += window_integral(a, b, q, theta, ts[i], ts[i + 1]);
    }
  }
  const double FK = K.total(), T = ts.back();
  acc += std::pow(FK, q) * std::pow(T, -theta * q) / (theta * q);
  return {true, std::pow(acc, 1.0 / q), PhiResult::Divergence::none};
}

// --- probe-set operator norms -----------------------------------------------------

double space_norm(const SpaceSpec& spec, const StepFunction& x) {
  if (const auto* ns = std::get_if<NormSpec>(&spec)) return norm(*ns, x);
  const auto& kq = std::get<KThetaQSpec>(spec);
  const PhiResult r = phi_theta_q(k_profile(x), kq.theta, kq.q);
  return r.finite ? r.value : kInf;
}

std::string space_name(const SpaceSpec& spec) {
  if (const auto* ns = std::get_if<NormSpec>(&spec)) return ns->name();
  const auto& kq = std::get<KThetaQSpec>(spec);
  return "K(" + std::to_string(kq.theta) + "," + std::to_string(kq.q) + ")";
}

namespace {

OperatorNormEstimate estimate_over(
    std::span<const StepFunction> probes, const SpaceSpec& X,
    const SpaceSpec& Y, const auto& image_of) {
  if (probes.empty())
    throw std::invalid_argument("operator_norm_estimate: empty probe set");
  OperatorNormEstimate est;
  est.probe_count = probes.size();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const double nx = space_norm(X, probes[i]);
    if (!(nx > 0.0))
      throw std::invalid_argument(
          "operator_norm_estimate: probe with zero X-norm");
    const double ratio = space_norm(Y, image_of(probes[i])) / nx;
    if (ratio > est.value) {
      est.value = ratio;
      est.witness = i;
    }
  }
  return est;
}

}  // namespace

OperatorNormEstimate operator_norm_estimate(
    const OperatorExpr& T, const SpaceSpec& X, const SpaceSpec& Y,
    std::span<const StepFunction> probes) {
  return estimate_over(probes, X, Y,
                       [&](const StepFunction& x) { return apply(T, x); });
}

OperatorNormEstimate operator_norm_estimate_diff(
    const OperatorExpr& T, const OperatorExpr& S, const SpaceSpec& X,
    const SpaceSpec& Y, std::span<const StepFunction> probes) {
  return estimate_over(probes, X, Y, [&](const StepFunction& x) {
    return subtract(apply(T, x), apply(S, x));
  });
}

}  // namespace rik
