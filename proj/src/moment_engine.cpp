#include "qld/moment_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "qld/errors.hpp"
#include "qld/quadrature.hpp"

namespace qld {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A tail integral whose decay exponent is within this margin of 1 is treated as
// divergent. Keeps q = 2/3 on the divergent side for nu = 3 despite rounding.
constexpr double kDivergenceMargin = 1e-9;

// Log of exp_p(u)^power, or -inf when exp_p(u) = 0. Requires exp_p(u) finite.
double log_exp_q_pow(double u, double p, double power) {
  const double k = 1.0 - p;
  const double base = 1.0 + k * u;
  if (base <= 0.0) return -kInf;
  return power * std::log1p(k * u) / k;
}

// E[exp_p(aX)] for the uniform law on [lo, hi], from d/du exp_p(u)^{2-p} = (2-p) exp_p(u).
ExtReal uniform_closed_mgf(const Uniform& m, double a, double p) {
  const double s = 2.0 - p;
  const double lh = log_exp_q_pow(a * m.hi, p, s);
  const double ll = log_exp_q_pow(a * m.lo, p, s);
  double diff;
  if (ll == -kInf) {
    diff = std::exp(lh);
  } else {
    diff = std::exp(ll) * std::expm1(lh - ll);
  }
  const double r = diff / (s * a * (m.hi - m.lo));
  if (!std::isfinite(r)) return ExtReal::infinity();
  return ExtReal(r);
}

// E[exp_p(aX)^power] by quadrature over the part of the support where the
// integrand is non-zero. Caller guarantees finiteness.
double expectation_of_power(const DistributionModel& model, double a, const Deformation& d,
                            Regime r, double power) {
  const double p = regime_parameter(d, r);
  const Support sup = model.support();
  const double scale = model.characteristic_scale();
  double lo = sup.lo;
  const double hi = sup.hi;
  if (r == Regime::FatTail) {
    lo = std::max(lo, -1.0 / ((1.0 - d.q()) * a));
  }

  auto integrand = [&](double x) {
    const double f = model.pdf(x);
    if (f == 0.0) return 0.0;
    const double lg = log_exp_q_pow(a * x, p, power);
    if (lg == -kInf) return 0.0;
    return f * std::exp(lg);
  };

  double total = 0.0;
  double split = lo;
  if (lo < 0.0 && hi > 0.0) {
    split = 0.0;
    // Near part directly; far algebraic tail mirrored onto [cut, inf). The
    // mirrored integrand vanishes beyond -lo in the fat-tail regime.
    const double cut = 16.0 * scale;
    const auto alpha = model.lower_tail_exponent();
    if (alpha && lo < -cut) {
      total += integrate(integrand, -cut, 0.0).value;
      auto mirrored = [&](double t) { return t > -lo ? 0.0 : integrand(-t); };
      total += integrate_to_infinity(mirrored, cut, *alpha, scale).value;
    } else {
      if (!std::isfinite(lo)) {
        throw DomainError("deformed MGF quadrature needs a finite effective lower limit");
      }
      total += integrate(integrand, lo, 0.0).value;
    }
  } else if (!std::isfinite(lo)) {
    throw DomainError("deformed MGF quadrature needs a finite effective lower limit");
  }
  if (std::isfinite(hi)) {
    total += integrate(integrand, split, hi).value;
  } else {
    const auto alpha = model.upper_tail_exponent();
    // Integrand grows like x^{power/(1-p)} against a pdf decaying like x^{-alpha}.
    const double decay = *alpha - power / (1.0 - p);
    total += integrate_to_infinity(integrand, split, decay, scale).value;
  }
  return total;
}

// Geometric probe sequence towards the upper end of the admissible a-range.
std::vector<double> probe_sequence(ExtReal a_max) {
  std::vector<double> seq;
  if (a_max.is_finite()) {
    for (int k = 1; k <= 52; ++k) seq.push_back(a_max.value() * (1.0 - std::ldexp(1.0, -k)));
  } else {
    for (int k = 0; k <= 110; ++k) seq.push_back(std::ldexp(1e-3, k));
  }
  return seq;
}

}  // namespace

const char* to_string(Regime r) noexcept {
  return r == Regime::CompactSupport ? "compact" : "fat";
}

double regime_parameter(const Deformation& d, Regime r) noexcept {
  return r == Regime::CompactSupport ? d.q_star() : d.q();
}

ExtReal admissible_a_max(const DistributionModel& model, const Deformation& d, Regime r) {
  const Support sup = model.support();
  const double k = 1.0 - d.q();
  if (r == Regime::CompactSupport) {
    // Pole of exp_{q*}(ax) at a x = 1/(1-q).
    if (!std::isfinite(sup.hi)) return ExtReal(0.0);
    if (sup.hi <= 0.0) return ExtReal::infinity();
    return ExtReal(1.0 / (k * sup.hi));
  }
  if (std::isfinite(sup.hi)) return ExtReal::infinity();
  const auto alpha = model.upper_tail_exponent();
  if (!alpha) return ExtReal(0.0);
  return (*alpha - 1.0 / k > 1.0 + kDivergenceMargin) ? ExtReal::infinity() : ExtReal(0.0);
}

bool has_closed_mgf(const DistributionModel& model, Regime) {
  return std::holds_alternative<Uniform>(model.kind());
}

ExtReal deformed_mgf_quadrature(const DistributionModel& model, double a, const Deformation& d,
                                Regime r) {
  if (!(a > 0.0)) throw DomainError("deformed MGF requires a > 0");
  if (a >= admissible_a_max(model, d, r)) return ExtReal::infinity();
  const double v = expectation_of_power(model, a, d, r, 1.0);
  if (!std::isfinite(v)) return ExtReal::infinity();
  return ExtReal(v);
}

ExtReal deformed_mgf(const DistributionModel& model, double a, const Deformation& d, Regime r) {
  if (!(a > 0.0)) throw DomainError("deformed MGF requires a > 0");
  if (a >= admissible_a_max(model, d, r)) return ExtReal::infinity();
  if (const auto* u = std::get_if<Uniform>(&model.kind())) {
    return uniform_closed_mgf(*u, a, regime_parameter(d, r));
  }
  return deformed_mgf_quadrature(model, a, d, r);
}

double theta_of_a(double a, ExtReal A, const Deformation& d, Regime r) {
  if (A.is_infinite() || !(A.value() > 0.0)) {
    throw DomainError("theta_of_a requires a finite positive A");
  }
  const double k = 1.0 - d.q();
  return r == Regime::CompactSupport ? a * std::pow(A.value(), k)
                                     : a * std::pow(A.value(), -k);
}

double phi_of_theta(const ThetaPoint& p, const Deformation& d, Regime r) {
  if (p.A.is_infinite()) throw DomainError("phi_of_theta requires a finite A");
  return r == Regime::CompactSupport ? ln_q(p.A.value(), d)
                                     : ln_q_star(p.A.value(), d);
}

ThetaPoint theta_point(const DistributionModel& model, double a, const Deformation& d,
                       Regime r) {
  ThetaPoint p;
  p.a = a;
  p.A = deformed_mgf(model, a, d, r);
  if (p.A.is_infinite()) {
    std::ostringstream os;
    os << "deformed MGF of " << model.name() << " diverges at a = " << a << " ("
       << to_string(r) << " regime, q = " << d.q() << ")";
    throw DivergenceError(os.str());
  }
  p.theta = theta_of_a(a, p.A, d, r);
  p.phi = phi_of_theta(p, d, r);
  return p;
}

double theta_derivative(const DistributionModel& model, double a, const Deformation& d,
                        Regime r) {
  const ThetaPoint p = theta_point(model, a, d, r);
  const double A = p.A.value();
  if (r == Regime::CompactSupport) {
    const double e = expectation_of_power(model, a, d, r, d.q_star());
    return std::pow(A, -d.q()) * e;
  }
  const double e = expectation_of_power(model, a, d, r, d.q());
  return p.theta / (a * A) * e;
}

ThetaRange theta_range(const DistributionModel& model, const Deformation& d, Regime r) {
  const ExtReal a_max = admissible_a_max(model, d, r);
  if (a_max == ExtReal(0.0)) {
    std::ostringstream os;
    os << "deformed MGF of " << model.name() << " diverges for every a > 0 ("
       << to_string(r) << " regime, q = " << d.q() << ")";
    throw DivergenceError(os.str());
  }
  double prev = 0.0;
  for (double a : probe_sequence(a_max)) {
    const ExtReal A = deformed_mgf(model, a, d, r);
    if (A.is_infinite()) return {ExtReal::infinity(), false};
    const double th = theta_of_a(a, A, d, r);
    if (!std::isfinite(th) || th > 1e300) return {ExtReal::infinity(), false};
    const double step = th - prev;
    if (prev > 0.0 && step <= 1e-12 * th) {
      // Increments shrink at least geometrically once converged; add the last
      // one as the remaining-tail estimate.
      return {ExtReal(th + std::max(step, 0.0)), true};
    }
    prev = th;
  }
  return {ExtReal::infinity(), false};
}

double invert_theta(double target_theta, const DistributionModel& model, const Deformation& d,
                    Regime r) {
  if (!(target_theta > 0.0)) throw DomainError("invert_theta requires a positive target");
  const ThetaRange range = theta_range(model, d, r);
  if (ExtReal(target_theta) >= range.theta_bar) {
    std::ostringstream os;
    os << "target theta " << target_theta << " is not below theta_bar "
       << range.theta_bar.value();
    throw RangeError(os.str());
  }
  const ExtReal a_max = admissible_a_max(model, d, r);
  auto theta_at = [&](double a) {
    const ExtReal A = deformed_mgf(model, a, d, r);
    if (A.is_infinite()) {
      std::ostringstream os;
      os << "deformed MGF diverges at a = " << a << " inside the inversion bracket";
      throw DivergenceError(os.str());
    }
    return theta_of_a(a, A, d, r);
  };

  const double tol = Tolerances::inversion * (1.0 + target_theta);
  double lo = 0.0;
  double hi = -1.0;
  for (double a : probe_sequence(a_max)) {
    const double th = theta_at(a);
    if (std::abs(th - target_theta) <= tol) return a;
    if (th > target_theta) {
      hi = a;
      break;
    }
    lo = a;
  }
  if (hi < 0.0) {
    throw RangeError("target theta not reached along the probe sequence");
  }

  double best = hi;
  double best_res = kInf;
  for (int it = 0; it < 400; ++it) {
    const double mid = (lo > 0.0 && hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double th = theta_at(mid);
    const double res = std::abs(th - target_theta);
    if (res < best_res) {
      best_res = res;
      best = mid;
    }
    if (res <= tol) return mid;
    (th > target_theta ? hi : lo) = mid;
  }
  if (best_res <= tol) return best;
  throw NumericalError("theta inversion stalled before reaching tolerance", best_res);
}

}  // namespace qld
