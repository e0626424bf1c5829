#include "qld/quadrature.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "qld/errors.hpp"

namespace qld {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
using Gauss = boost::math::quadrature::gauss<double, 7>;

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

// One 15-point Kronrod panel with the QUADPACK error heuristic.
Segment kronrod_panel(const Integrand& f, double lo, double hi) {
  const auto& xk = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();
  constexpr double eps = std::numeric_limits<double>::epsilon();

  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  std::array<double, 15> fv{};

  fv[0] = f(center);
  double kron = wk[0] * fv[0];
  double gauss = wg[0] * fv[0];
  double resabs = std::abs(kron);
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double dx = half * xk[i];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv[2 * i - 1] = f1;
    fv[2 * i] = f2;
    kron += wk[i] * (f1 + f2);
    resabs += wk[i] * (std::abs(f1) + std::abs(f2));
    // Gauss nodes sit at the even Kronrod indices.
    if (i % 2 == 0) gauss += wg[i / 2] * (f1 + f2);
  }
  const double mean = 0.5 * kron;
  double resasc = wk[0] * std::abs(fv[0] - mean);
  for (std::size_t i = 1; i < xk.size(); ++i) {
    resasc += wk[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));
  }
  kron *= half;
  gauss *= half;
  resabs *= std::abs(half);
  resasc *= std::abs(half);

  double err = std::abs(kron - gauss);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * resabs, err);
  }
  if (!std::isfinite(kron) || !std::isfinite(err)) {
    throw NumericalError("non-finite integrand value in quadrature",
                         std::numeric_limits<double>::infinity());
  }
  return {lo, hi, kron, err};
}

}  // namespace

QuadratureResult integrate(const Integrand& f, double lo, double hi,
                           const QuadratureOptions& opts) {
  if (!(std::isfinite(lo) && std::isfinite(hi))) {
    throw DomainError("integrate requires finite limits");
  }
  if (lo == hi) return {0.0, 0.0, 0};

  std::priority_queue<Segment> heap;
  heap.push(kronrod_panel(f, lo, hi));
  double total = heap.top().value;
  double total_err = heap.top().error;
  // Segments too narrow to split further; their error is frozen.
  double frozen_err = 0.0;
  double frozen_val = 0.0;
  int count = 1;

  auto done = [&] {
    const double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    return total_err <= tol;
  };

  while (!done()) {
    if (heap.empty() || count >= opts.max_intervals) {
      std::ostringstream os;
      os << "quadrature did not converge on [" << lo << ", " << hi
         << "]: error estimate " << total_err << " after " << count << " panels";
      throw NumericalError(os.str(), total_err);
    }
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi) ||
        (worst.hi - worst.lo) < 64.0 * std::numeric_limits<double>::epsilon() *
                                     std::max(std::abs(worst.lo), std::abs(worst.hi))) {
      frozen_err += worst.error;
      frozen_val += worst.value;
      continue;
    }
    const Segment left = kronrod_panel(f, worst.lo, mid);
    const Segment right = kronrod_panel(f, mid, worst.hi);
    ++count;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to shed the drift of the running update.
  double value = frozen_val;
  double err = frozen_err;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {value, err, count};
}

QuadratureResult integrate_to_infinity(const Integrand& f, double lo,
                                       double decay, double scale,
                                       const QuadratureOptions& opts) {
  if (!(decay > 1.0)) {
    throw DomainError("integrate_to_infinity requires decay exponent > 1");
  }
  if (!(scale > 0.0)) throw DomainError("substitution scale must be positive");
  const double k = std::max(1.0, 1.0 / (decay - 1.0));
  auto g = [&](double s) {
    const double sk = std::pow(s, -k);
    const double x = lo + scale * (sk - 1.0);
    const double fx = f(x);
    if (fx == 0.0) return 0.0;
    return fx * scale * k * sk / s;
  };
  return integrate(g, 0.0, 1.0, opts);
}

}  // namespace qld
