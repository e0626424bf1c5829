#pragma once

#include <compare>
#include <limits>

namespace qld {

// Shared numerical tolerances. Property tests and the acceptance suite read
// the same constants.
struct Tolerances {
  static constexpr double identity_rel = 1e-12;
  static constexpr double convexity = 1e-9;
  static constexpr double quadrature_abs = 1e-13;
  static constexpr double quadrature_rel = 1e-10;
  static constexpr double inversion = 1e-10;
  static constexpr double golden_rel = 1e-8;
};

// Deformation parameter q in (0,1) and its dual q* = 2 - q in (1,2).
class Deformation {
 public:
  explicit Deformation(double q);

  double q() const noexcept { return q_; }
  double q_star() const noexcept { return 2.0 - q_; }

  friend bool operator==(const Deformation&, const Deformation&) = default;

 private:
  double q_;
};

// Real number or +infinity. Never NaN, never -infinity.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  ExtReal(double v);  // NOLINT(google-explicit-constructor)

  static constexpr ExtReal infinity() {
    ExtReal r;
    r.v_ = std::numeric_limits<double>::infinity();
    return r;
  }

  constexpr bool is_finite() const noexcept {
    return v_ != std::numeric_limits<double>::infinity();
  }
  constexpr bool is_infinite() const noexcept { return !is_finite(); }
  constexpr double value() const noexcept { return v_; }

  friend constexpr auto operator<=>(const ExtReal& a, const ExtReal& b) {
    return a.v_ <=> b.v_;
  }
  friend constexpr bool operator==(const ExtReal& a, const ExtReal& b) {
    return a.v_ == b.v_;
  }

  // inf * positive = inf; inf * 0 is rejected.
  friend ExtReal operator*(ExtReal a, ExtReal b);

 private:
  double v_ = 0.0;
};

ExtReal pow(ExtReal base, double exponent);

// (u^(1-p) - 1) / (1 - p) for u > 0, p in (0,2) \ {1}.
double ln_q(double u, double p);

// [1 + (1-p) u]_+^(1/(1-p)). Total: returns 0 below the support for p < 1 and
// +inf at and beyond the pole u = 1/(p-1) for p > 1.
ExtReal exp_q(double u, double p);

// Deformation-aware forms. The q* variants use 1 - q* = -(1 - q) exactly, so
// that paired evaluations share one rounding of the bracket 1 + (1-q) u.
double ln_q(double u, const Deformation& d);
double ln_q_star(double u, const Deformation& d);
ExtReal exp_q(double u, const Deformation& d);
ExtReal exp_q_star(double u, const Deformation& d);

// exp_q(u) * exp_{q*}(-u); equals 1 whenever 1 + (1-q) u > 0.
double duality_product(double u, const Deformation& d);

}  // namespace qld
