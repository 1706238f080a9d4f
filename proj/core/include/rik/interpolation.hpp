#pragma once

#include <span>
#include <variant>

#include "rik/measure.hpp"
#include "rik/operators.hpp"
#include "rik/spaces.hpp"

// Real interpolation for the couple (L1, Linf): K(t, x) equals the
// cumulative profile of x at t, the Phi_{theta,q} functional integrates the
// K profile, and operator norms over unit balls are replaced by probe-set
// maxima (which are lower bounds by construction and labelled as such).

namespace rik {

class KProfile {
 public:
  explicit KProfile(CumulativeProfile profile) : profile_(std::move(profile)) {}

  double operator()(double t) const;  // t > 0
  const CumulativeProfile& profile() const { return profile_; }

 private:
  CumulativeProfile profile_;
};

// K(t, x) = inf{ ||x0||_1 + t ||x1||_inf : x = x0 + x1 } = integral_0^t x*.
double k_functional(double t, const StepFunction& x);
KProfile k_profile(const StepFunction& x);

struct PhiResult {
  enum class Divergence { none, at_zero, at_infinity };

  bool finite = true;
  double value = 0.0;  // +inf when not finite
  Divergence divergent_end = Divergence::none;
};

// Phi_{theta,q}(K) = ( integral_0^inf (t^-theta K(t))^q dt/t )^{1/q};
// q may be +inf (sup form).  Divergence is a value, not an error.
PhiResult phi_theta_q(const KProfile& profile, double theta, double q);

struct KThetaQSpec {
  double theta = 0.5;
  double q = 2.0;

  bool operator==(const KThetaQSpec&) const = default;
};

using SpaceSpec = std::variant<NormSpec, KThetaQSpec>;

// Dispatch: classical norm or Phi_{theta,q} of the K profile (+inf when
// divergent).
double space_norm(const SpaceSpec& spec, const StepFunction& x);
std::string space_name(const SpaceSpec& spec);

struct OperatorNormEstimate {
  double value = 0.0;       // max over probes of ||Tx||_Y / ||x||_X
  std::size_t probe_count = 0;
  std::size_t witness = 0;  // index of the maximizing probe
  // Probe maxima never exceed the true operator norm.
  static constexpr const char* bound_kind = "lower";
};

OperatorNormEstimate operator_norm_estimate(const OperatorExpr& T,
                                            const SpaceSpec& X,
                                            const SpaceSpec& Y,
                                            std::span<const StepFunction> probes);

// Same for the difference x -> T x - S x, computed at the function level.
OperatorNormEstimate operator_norm_estimate_diff(
    const OperatorExpr& T, const OperatorExpr& S, const SpaceSpec& X,
    const SpaceSpec& Y, std::span<const StepFunction> probes);

}  // namespace rik
