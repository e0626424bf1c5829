#include "qld/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "qld/deformed_math.hpp"
#include "qld/distributions.hpp"
#include "qld/mc_harness.hpp"
#include "qld/moment_engine.hpp"
#include "qld/quadrature.hpp"
#include "qld/random.hpp"
#include "qld/rate_bounds.hpp"

namespace qld {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

CheckResult check(std::string name, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    auto [ok, detail] = body();
    return {std::move(name), ok, std::move(detail)};
  } catch (const std::exception& e) {
    return {std::move(name), false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

std::vector<CheckResult> run_selftest(std::uint64_t seed, unsigned workers) {
  std::vector<CheckResult> out;
  Rng rng(seed);
  constexpr int kPoints = 1000;

  out.push_back(check("duality_product", [&] {
    double worst = 0.0;
    for (int i = 0; i < kPoints; ++i) {
      const Deformation d(0.01 + 0.98 * rng.uniform());
      const double u = -0.999 / (1.0 - d.q()) + 20.0 * rng.uniform();
      worst = std::max(worst, std::abs(duality_product(u, d) - 1.0));
    }
    return std::pair{worst <= 1e-12, "max |prod-1| = " + fmt(worst)};
  }));

  out.push_back(check("ln_exp_roundtrip", [&] {
    double worst = 0.0;
    for (int i = 0; i < kPoints; ++i) {
      double p = 0.02 + 1.96 * rng.uniform();
      if (std::abs(p - 1.0) < 1e-3) p = 0.5;
      const double u = std::exp(-5.0 + 10.0 * rng.uniform());
      worst = std::max(worst, std::abs(exp_q(ln_q(u, p), p).value() / u - 1.0));
    }
    return std::pair{worst <= 1e-12, "max rel err = " + fmt(worst)};
  }));

  out.push_back(check("product_inequalities", [&] {
    int violations = 0;
    for (int i = 0; i < kPoints; ++i) {
      const Deformation d(0.01 + 0.98 * rng.uniform());
      const double a = 10.0 * rng.uniform_pos();
      const double b = 10.0 * rng.uniform_pos();
      const double lhs = exp_q(a + b, d).value();
      const double rhs = exp_q(a, d).value() * exp_q(b, d).value();
      if (lhs > rhs * (1.0 + 1e-12)) ++violations;
      const double l2 = exp_q_star(-a - b, d).value();
      const double r2 = exp_q_star(-a, d).value() * exp_q_star(-b, d).value();
      if (l2 < r2 * (1.0 - 1e-12)) ++violations;
      if (q_exp_tail(a, d) * q_exp_tail(b, d) > q_exp_tail(a + b, d) + 1e-12) ++violations;
    }
    return std::pair{violations == 0, std::to_string(violations) + " violations"};
  }));

  out.push_back(check("uniform_rate_closed_form", [&] {
    const auto model = DistributionModel::uniform();
    const Deformation d(0.5);
    double worst = 0.0;
    for (int k = 0; k <= 8; ++k) {
      const double x = 0.55 + 0.05 * k;
      const RateResult r = rate_function(x, model, d, Regime::CompactSupport);
      worst = std::max(worst, std::abs(r.rate.value() - (2.0 - 4.0 * std::sqrt(x * (1 - x)))));
    }
    return std::pair{worst <= 1e-5, "max |dI| = " + fmt(worst)};
  }));

  out.push_back(check("fig1_ordering", [&] {
    const auto model = DistributionModel::uniform();
    const Deformation d(0.5);
    int bad = 0;
    for (int k = 1; k < 10; ++k) {
      const double x = 0.5 + 0.05 * k;
      if (chernoff_standard(x, 1, model).value > compact_deformed_bound(x, 1, model, d)) ++bad;
    }
    return std::pair{bad == 0, std::to_string(bad) + " rows out of order"};
  }));

  out.push_back(check("theta_monotone", [&] {
    const Deformation d(0.6);
    const auto t3 = DistributionModel::student_t(3);
    const auto uni = DistributionModel::uniform();
    int bad = 0;
    double prev_fat = 0.0;
    double prev_compact = 0.0;
    for (int k = 0; k < 40; ++k) {
      const double a = std::pow(10.0, -3.0 + 5.0 * k / 39.0);
      const double tf = theta_point(t3, a, d, Regime::FatTail).theta;
      if (tf <= prev_fat) ++bad;
      prev_fat = tf;
      const double ac = 2.4 * (1.0 - std::pow(10.0, -0.1 * (k + 1)));
      const double tc = theta_point(uni, ac, d, Regime::CompactSupport).theta;
      if (tc <= prev_compact) ++bad;
      prev_compact = tc;
    }
    return std::pair{bad == 0, std::to_string(bad) + " non-increasing steps"};
  }));

  out.push_back(check("student_t_tail_vs_quadrature", [&] {
    double worst = 0.0;
    for (double x : {0.0, 0.5, 1.7320508075688772, 4.0, 12.0, 30.0}) {
      const auto r = integrate_to_infinity([](double t) { return student_t_pdf(t, 3); }, x, 4.0,
                                           std::max(1.0, x));
      worst = std::max(worst, std::abs(r.value - student_t_tail(x, 3)));
    }
    return std::pair{worst <= 1e-9, "max diff = " + fmt(worst)};
  }));

  out.push_back(check("markov_infimum", [&] {
    const auto model = DistributionModel::uniform();
    const Deformation d(0.5);
    const double x = 0.75;
    double best = 1.0;
    for (int k = 1; k < 4000; ++k) {
      const double a = 2.0 * k / 4000.0;
      best = std::min(best, markov_fixed_a_bound(x, 1, a, model, d).value());
    }
    const double c = compact_deformed_bound(x, 1, model, d);
    return std::pair{std::abs(best - c) <= 1e-6, "grid min - bound = " + fmt(best - c)};
  }));

  out.push_back(check("mc_sandwich_qexp", [&] {
    const Deformation d(0.5);
    const auto model = DistributionModel::q_exponential(d);
    const double grid[] = {3.0, 4.0, 6.0};
    const auto est = estimate_curve(model, 5, grid, {200'000, seed, workers});
    int bad = 0;
    for (const auto& e : est) {
      if (lower_bound_sum(e.x, 5, model) > e.upper_3sigma()) ++bad;
    }
    return std::pair{bad == 0, std::to_string(bad) + " grid points below the lower bound"};
  }));

  return out;
}

}  // namespace qld
