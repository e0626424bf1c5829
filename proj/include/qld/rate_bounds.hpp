#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qld/deformed_math.hpp"
#include "qld/distributions.hpp"
#include "qld/mc_harness.hpp"
#include "qld/moment_engine.hpp"

namespace qld {

struct RateResult {
  double x = 0.0;
  ExtReal rate;             // sup_theta { theta x - Phi(theta) }
  double theta_star = 0.0;  // 0 when the sup is attained as theta -> 0
  double a_star = 0.0;      // last probe when the sup is only approached as a -> sup
};

// Deformed rate function: log-space scan over a (64 points per decade) followed
// by golden-section refinement to |da|/a < 1e-8.
RateResult rate_function(double x, const DistributionModel& model, const Deformation& d,
                         Regime r);

// Classical rate function sup_a { a x - ln E e^{aX} }. Returns nullopt when the
// ordinary moment-generating function is infinite for every a > 0.
std::optional<RateResult> classical_rate_function(double x, const DistributionModel& model);

struct ChernoffBound {
  double value = 1.0;
  bool ldp_available = true;
};

// e^{-n I_1(x)} capped at 1; the trivial bound 1 with ldp_available = false for
// models without a finite moment-generating function.
ChernoffBound chernoff_standard(double x, int n, const DistributionModel& model);

// [exp_q(-I(x))]^n with the CompactSupport rate function, capped at 1.
double compact_deformed_bound(double x, int n, const DistributionModel& model,
                              const Deformation& d);

// [exp_q(-a x)]^n A^n(a), A = E exp_{q*}(aX); requires (1-q) a x < 1.
ExtReal markov_fixed_a_bound(double x, int n, double a, const DistributionModel& model,
                             const Deformation& d);

// exp_{q*}(-a n x) A^n(a), A = E exp_q(aX). Positive-support models only. Valid
// for every n but loose for n > 1 since A^n grows exponentially.
ExtReal fat_markov_bound(double x, int n, double a, const DistributionModel& model,
                         const Deformation& d);

// 1 - (1 - tail(n x))^n, a lower bound on P(mean >= x); x > 0.
double lower_bound_sum(double x, int n, const DistributionModel& model);

// y = a A^{1-q*} x - ln_{q*} A; requires x > ln_q(A) / a.
double fat_change_of_variable(double x, double a, double A, const Deformation& d);

// Upper bound eta_n(y) on P(mean >= x), with eta_n estimated by Monte Carlo on
// the unit q*-exponential law. nullopt when x <= ln_q(A)/a.
std::optional<MCEstimate> fat_upper_bound_mc(double x, int n, double a,
                                             const DistributionModel& model,
                                             const Deformation& d, const MCOptions& opts);

// n eta(n (x - 1/q)); x > 1/q.
double eta_n_asymptotic(double x, int n, const Deformation& d);

// n exp_{q*}(n/q - n I(x)) with the FatTail rate function.
ExtReal xi_asymptotic(double x, int n, const DistributionModel& model, const Deformation& d);

// n exp_{q*}(n/q + n/(1-q) - n/(1-q) (1 + (1-q) a x) / A(a)^{1-q}).
ExtReal fixed_a_asymptotic(double x, int n, double a, const DistributionModel& model,
                           const Deformation& d);

enum class BoundKind {
  ChernoffStandard,
  CompactDeformed,
  MarkovFixedA,
  LowerSum,
  FatUpperMC,
  XiAsymptotic,
  FixedAAsymptotic,
};

const char* to_string(BoundKind k) noexcept;
bool is_asymptotic(BoundKind k) noexcept;

struct BoundCurve {
  BoundKind kind = BoundKind::LowerSum;
  int n = 1;
  double q = 1.0;
  std::optional<double> a;
  std::vector<std::pair<double, ExtReal>> grid;
  bool asymptotic = false;
};

// Evaluate value(x) over a strictly increasing grid. Non-asymptotic kinds are
// clamped to [0, 1]; asymptotic envelopes are kept raw. Points are independent
// and evaluated on `workers` threads; the result is ordered by x.
BoundCurve tabulate(BoundKind kind, int n, double q, std::optional<double> a,
                    std::span<const double> xs, const std::function<ExtReal(double)>& value,
                    unsigned workers = 1);

}  // namespace qld
