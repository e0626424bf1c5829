#include "qld/deformed_math.hpp"

#include <cmath>
#include <sstream>

#include "qld/errors.hpp"

namespace qld {

namespace {

void check_parameter(double p) {
  if (!(p > 0.0 && p < 2.0) || p == 1.0) {
    std::ostringstream os;
    os << "deformation parameter " << p << " outside (0,2) \\ {1}";
    throw DomainError(os.str());
  }
}

// ln and exp with k = 1 - p supplied directly.
double ln_k(double u, double k) {
  if (!(u > 0.0)) {
    std::ostringstream os;
    os << "ln_q requires u > 0, got " << u;
    throw DomainError(os.str());
  }
  if (u == 1.0) return 0.0;
  // expm1 keeps relative accuracy when u^(1-p) is close to 1.
  return std::expm1(k * std::log(u)) / k;
}

ExtReal exp_k(double u, double k) {
  if (u == 0.0) return ExtReal(1.0);
  const double ku = k * u;
  if (1.0 + ku <= 0.0) {
    return k > 0.0 ? ExtReal(0.0) : ExtReal::infinity();
  }
  const double r = std::exp(std::log1p(ku) / k);
  return std::isinf(r) ? ExtReal::infinity() : ExtReal(r);
}

}  // namespace

Deformation::Deformation(double q) : q_(q) {
  if (!(q > 0.0 && q < 1.0)) {
    std::ostringstream os;
    os << "deformation q = " << q << " must lie strictly inside (0,1)";
    throw DomainError(os.str());
  }
}

ExtReal::ExtReal(double v) : v_(v) {
  if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) {
    throw DomainError("ExtReal accepts finite values or +inf only");
  }
}

ExtReal operator*(ExtReal a, ExtReal b) {
  if (a.is_infinite() || b.is_infinite()) {
    const double other = a.is_infinite() ? b.value() : a.value();
    if (other > 0.0) return ExtReal::infinity();
    throw DomainError("product of +inf with a non-positive value");
  }
  return ExtReal(a.value() * b.value());
}

ExtReal pow(ExtReal base, double exponent) {
  if (base.is_infinite()) {
    if (exponent > 0.0) return ExtReal::infinity();
    return exponent < 0.0 ? ExtReal(0.0) : ExtReal(1.0);
  }
  if (base.value() < 0.0) throw DomainError("negative base in ExtReal pow");
  if (base.value() == 0.0) {
    if (exponent < 0.0) return ExtReal::infinity();
    return exponent == 0.0 ? ExtReal(1.0) : ExtReal(0.0);
  }
  return ExtReal(std::pow(base.value(), exponent));
}

double ln_q(double u, double p) {
  check_parameter(p);
  return ln_k(u, 1.0 - p);
}

ExtReal exp_q(double u, double p) {
  check_parameter(p);
  return exp_k(u, 1.0 - p);
}

double ln_q(double u, const Deformation& d) { return ln_k(u, 1.0 - d.q()); }
double ln_q_star(double u, const Deformation& d) { return ln_k(u, -(1.0 - d.q())); }
ExtReal exp_q(double u, const Deformation& d) { return exp_k(u, 1.0 - d.q()); }
ExtReal exp_q_star(double u, const Deformation& d) { return exp_k(u, -(1.0 - d.q())); }

double duality_product(double u, const Deformation& d) {
  if (!(1.0 + (1.0 - d.q()) * u > 0.0)) {
    throw DomainError("duality_product requires 1 + (1-q) u > 0");
  }
  return exp_q(u, d).value() * exp_q_star(-u, d).value();
}

}  // namespace qld
