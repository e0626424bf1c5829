#include "qld/rate_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "qld/errors.hpp"
#include "qld/golden_section.hpp"

namespace qld {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kPointsPerDecade = 64;

struct Maximum {
  ExtReal value;
  double a = 0.0;
};

// Points a_lo * 10^(k/64) up to and including a_hi.
std::vector<double> log_grid(double a_lo, double a_hi) {
  std::vector<double> g;
  const double decades = std::log10(a_hi / a_lo);
  const int steps = std::max(1, static_cast<int>(std::ceil(decades * kPointsPerDecade)));
  for (int i = 0; i <= steps; ++i) {
    g.push_back(a_lo * std::pow(a_hi / a_lo, static_cast<double>(i) / steps));
  }
  return g;
}

// Scan grid over the admissible a-range (0, a_max). A finite a_max is approached
// on a second log grid in the gap a_max - a, since the objective typically
// varies fastest next to the pole.
std::vector<double> scan_grid(ExtReal a_max) {
  if (a_max.is_infinite()) return log_grid(1e-8, 1e8);
  const double m = a_max.value();
  std::vector<double> g = log_grid(m * 1e-10, 0.5 * m);
  const std::vector<double> gaps = log_grid(m * 1e-12, 0.5 * m);
  for (auto it = gaps.rbegin() + 1; it != gaps.rend(); ++it) g.push_back(m - *it);
  return g;
}

// Follow the objective past the last grid point towards the end of the
// admissible range. Returns +inf when it keeps growing without settling.
Maximum follow_boundary(const std::function<double(double)>& f, ExtReal a_max, double a_last,
                        double v_last) {
  double a = a_last;
  double v = v_last;
  double prev_step = kInf;
  int growing = 0;
  const int max_probes = a_max.is_finite() ? 60 : 200;
  for (int j = 0; j < max_probes; ++j) {
    double next;
    if (a_max.is_finite()) {
      const double gap = 0.5 * (a_max.value() - a);
      next = a_max.value() - gap;
      if (!(next > a && next < a_max.value())) break;
    } else {
      next = 2.0 * a;
      if (next > 1e250) break;
    }
    const double fv = f(next);
    if (!std::isfinite(fv)) break;
    const double step = fv - v;
    if (step <= 1e-12 * (1.0 + std::abs(fv))) {
      if (fv > v) {
        a = next;
        v = fv;
      }
      return {ExtReal(v), a};
    }
    growing = (step >= 0.9 * prev_step) ? growing + 1 : 0;
    if (growing >= 6 || fv > 1e12) return {ExtReal::infinity(), next};
    prev_step = step;
    a = next;
    v = fv;
  }
  // Ran out of resolution while still increasing.
  if (growing >= 3) return {ExtReal::infinity(), a};
  return {ExtReal(v), a};
}

// sup over a in (0, a_max) of f, where f(a) = -inf marks an inadmissible point.
Maximum maximize_over_a(const std::function<double(double)>& f, ExtReal a_max) {
  const std::vector<double> grid = scan_grid(a_max);
  std::vector<double> vals(grid.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    vals[i] = f(grid[i]);
    if (vals[i] > vals[best]) best = i;
  }
  if (!(vals[best] > 0.0)) return {ExtReal(0.0), 0.0};

  if (best + 1 == grid.size() || !std::isfinite(vals[best + 1])) {
    return follow_boundary(f, a_max, grid[best], vals[best]);
  }
  const double lo = best == 0 ? 0.5 * grid[0] : grid[best - 1];
  const double hi = grid[best + 1];
  const GoldenResult g = golden_section_maximize(f, lo, hi, Tolerances::golden_rel);
  if (g.fx > vals[best]) return {ExtReal(g.fx), g.x};
  return {ExtReal(vals[best]), grid[best]};
}

// ln E e^{aX} for the uniform law, evaluated without overflow.
double uniform_log_mgf(const Uniform& m, double a) {
  const double w = a * (m.hi - m.lo);
  // ln((e^w - 1)/w) = w + ln(1 - e^{-w}) - ln w
  const double rest = w < 1.0 ? std::log(std::expm1(w) / w) : w + std::log1p(-std::exp(-w)) - std::log(w);
  return a * m.lo + rest;
}

}  // namespace

RateResult rate_function(double x, const DistributionModel& model, const Deformation& d,
                         Regime r) {
  const ExtReal a_max = admissible_a_max(model, d, r);
  if (a_max == ExtReal(0.0)) {
    std::ostringstream os;
    os << "rate function unavailable: deformed MGF of " << model.name()
       << " diverges for every a > 0 (" << to_string(r) << " regime, q = " << d.q() << ")";
    throw DivergenceError(os.str());
  }
  // Jensen: both deformed exponentials are convex, so the objective is <= 0
  // for every a when x <= E X.
  if (model.has_closed_mean() && x <= model.mean()) return RateResult{x, ExtReal(0.0), 0.0, 0.0};
  auto objective = [&](double a) {
    const ExtReal A = deformed_mgf(model, a, d, r);
    if (A.is_infinite()) return -kInf;
    ThetaPoint p{a, A, theta_of_a(a, A, d, r), 0.0};
    p.phi = phi_of_theta(p, d, r);
    return p.theta * x - p.phi;
  };
  const Maximum m = maximize_over_a(objective, a_max);
  RateResult res;
  res.x = x;
  res.rate = m.value;
  res.a_star = m.a;
  if (m.a > 0.0) {
    const ExtReal A = deformed_mgf(model, m.a, d, r);
    if (A.is_finite()) res.theta_star = theta_of_a(m.a, A, d, r);
  }
  return res;
}

std::optional<RateResult> classical_rate_function(double x, const DistributionModel& model) {
  const auto* u = std::get_if<Uniform>(&model.kind());
  if (u == nullptr) return std::nullopt;
  if (x <= 0.5 * (u->lo + u->hi)) return RateResult{x, ExtReal(0.0), 0.0, 0.0};
  auto objective = [&](double a) { return a * x - uniform_log_mgf(*u, a); };
  const Maximum m = maximize_over_a(objective, ExtReal::infinity());
  return RateResult{x, m.value, m.a, m.a};
}

ChernoffBound chernoff_standard(double x, int n, const DistributionModel& model) {
  if (n < 1) throw DomainError("n must be >= 1");
  const auto rate = classical_rate_function(x, model);
  if (!rate) return {1.0, false};
  if (rate->rate.is_infinite()) return {0.0, true};
  return {std::min(1.0, std::exp(-n * rate->rate.value())), true};
}

double compact_deformed_bound(double x, int n, const DistributionModel& model,
                              const Deformation& d) {
  if (n < 1) throw DomainError("n must be >= 1");
  const RateResult r = rate_function(x, model, d, Regime::CompactSupport);
  if (r.rate.is_infinite()) return 0.0;
  const double e = exp_q(-r.rate.value(), d).value();
  return std::min(1.0, std::pow(e, n));
}

ExtReal markov_fixed_a_bound(double x, int n, double a, const DistributionModel& model,
                             const Deformation& d) {
  if (n < 1) throw DomainError("n must be >= 1");
  if (!(a > 0.0)) throw DomainError("markov bound requires a > 0");
  if (!((1.0 - d.q()) * a * x < 1.0)) {
    throw DomainError("markov bound requires (1-q) a x < 1");
  }
  const ExtReal A = deformed_mgf(model, a, d, Regime::CompactSupport);
  const ExtReal e = exp_q(-a * x, d);
  return pow(e * A, n);
}

ExtReal fat_markov_bound(double x, int n, double a, const DistributionModel& model,
                         const Deformation& d) {
  if (n < 1) throw DomainError("n must be >= 1");
  if (!(a > 0.0)) throw DomainError("fat-tail markov bound requires a > 0");
  if (!(x > 0.0)) throw DomainError("fat-tail markov bound requires x > 0");
  if (model.support().lo < 0.0) {
    throw DomainError("fat-tail markov bound requires a non-negative random variable");
  }
  const ExtReal A = deformed_mgf(model, a, d, Regime::FatTail);
  const ExtReal e = exp_q_star(-a * n * x, d);
  return e * pow(A, n);
}

double lower_bound_sum(double x, int n, const DistributionModel& model) {
  if (n < 1) throw DomainError("n must be >= 1");
  if (!(x > 0.0)) throw DomainError("lower_bound_sum requires x > 0");
  const double t = model.tail(n * x);
  if (t >= 1.0) return 1.0;
  if (n == 1) return t;
  return -std::expm1(n * std::log1p(-t));
}

double fat_change_of_variable(double x, double a, double A, const Deformation& d) {
  if (!(a > 0.0)) throw DomainError("change of variable requires a > 0");
  if (!(A > 0.0 && std::isfinite(A))) {
    throw DomainError("change of variable requires a finite positive A");
  }
  const double threshold = ln_q(A, d) / a;
  if (x < threshold) {
    std::ostringstream os;
    os << "change of variable requires x > ln_q(A)/a = " << threshold << ", got " << x;
    throw DomainError(os.str());
  }
  return a * std::pow(A, 1.0 - d.q_star()) * x - ln_q_star(A, d);
}

std::optional<MCEstimate> fat_upper_bound_mc(double x, int n, double a,
                                             const DistributionModel& model,
                                             const Deformation& d, const MCOptions& opts) {
  const ExtReal A = deformed_mgf(model, a, d, Regime::FatTail);
  if (A.is_infinite()) {
    throw DivergenceError("fat-tail upper bound needs a finite E exp_q(aX)");
  }
  if (!(x > ln_q(A.value(), d) / a)) return std::nullopt;
  const double y = fat_change_of_variable(x, a, A.value(), d);
  return estimate_tail_of_mean(DistributionModel::q_exponential(d), n, y, opts);
}

double eta_n_asymptotic(double x, int n, const Deformation& d) {
  if (n < 1) throw DomainError("n must be >= 1");
  if (!(x > q_exp_mean(d))) throw DomainError("eta_n asymptotic requires x > 1/q");
  return n * q_exp_tail(n * (x - q_exp_mean(d)), d);
}

ExtReal xi_asymptotic(double x, int n, const DistributionModel& model, const Deformation& d) {
  if (n < 1) throw DomainError("n must be >= 1");
  const RateResult r = rate_function(x, model, d, Regime::FatTail);
  if (r.rate.is_infinite()) return ExtReal(0.0);
  const double u = n / d.q() - n * r.rate.value();
  return ExtReal(n) * exp_q_star(u, d);
}

ExtReal fixed_a_asymptotic(double x, int n, double a, const DistributionModel& model,
                           const Deformation& d) {
  if (n < 1) throw DomainError("n must be >= 1");
  if (!(a > 0.0)) throw DomainError("fixed-a envelope requires a > 0");
  const ExtReal A = deformed_mgf(model, a, d, Regime::FatTail);
  if (A.is_infinite()) {
    std::ostringstream os;
    os << "E exp_q(aX) diverges for " << model.name() << " at q = " << d.q();
    throw DivergenceError(os.str());
  }
  const double k = 1.0 - d.q();
  const double u = n / d.q() + n / k - n / k * (1.0 + k * a * x) / std::pow(A.value(), k);
  return ExtReal(n) * exp_q_star(u, d);
}

const char* to_string(BoundKind k) noexcept {
  switch (k) {
    case BoundKind::ChernoffStandard: return "chernoff";
    case BoundKind::CompactDeformed: return "compact";
    case BoundKind::MarkovFixedA: return "markov";
    case BoundKind::LowerSum: return "lower";
    case BoundKind::FatUpperMC: return "fat-upper-mc";
    case BoundKind::XiAsymptotic: return "xi";
    case BoundKind::FixedAAsymptotic: return "fixed-a";
  }
  return "?";
}

bool is_asymptotic(BoundKind k) noexcept {
  return k == BoundKind::XiAsymptotic || k == BoundKind::FixedAAsymptotic;
}

BoundCurve tabulate(BoundKind kind, int n, double q, std::optional<double> a,
                    std::span<const double> xs, const std::function<ExtReal(double)>& value,
                    unsigned workers) {
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw DomainError("x grid must be strictly increasing");
  }
  BoundCurve c{kind, n, q, a, {}, is_asymptotic(kind)};
  std::vector<ExtReal> vals(xs.size());
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](unsigned w, unsigned stride) {
    try {
      for (std::size_t i = w; i < xs.size(); i += stride) vals[i] = value(xs[i]);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  const unsigned stride = std::max(1u, std::min<unsigned>(workers, xs.size()));
  if (stride == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < stride; ++w) pool.emplace_back(work, w, stride);
  }
  if (failure) std::rethrow_exception(failure);

  c.grid.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ExtReal v = vals[i];
    if (!c.asymptotic) v = ExtReal(std::clamp(v.value(), 0.0, 1.0));
    c.grid.emplace_back(xs[i], v);
  }
  return c;
}

}  // namespace qld
