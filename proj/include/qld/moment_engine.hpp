#pragma once

#include "qld/deformed_math.hpp"
#include "qld/distributions.hpp"

namespace qld {

// CompactSupport: A(a) = E exp_{q*}(aX), theta = A^{1-q} a,   Phi = ln_q A.
// FatTail:        A(a) = E exp_q(aX),    theta = a / A^{1-q}, Phi = ln_{q*} A.
enum class Regime { CompactSupport, FatTail };

const char* to_string(Regime r) noexcept;

struct ThetaPoint {
  double a = 0.0;
  ExtReal A;
  double theta = 0.0;
  double phi = 0.0;
};

struct ThetaRange {
  ExtReal theta_bar;
  // False when probing found theta still growing at the probe cap.
  bool bounded = true;
};

// Deformation index used inside the expectation: q* for CompactSupport, q for FatTail.
double regime_parameter(const Deformation& d, Regime r) noexcept;

// Supremum of the a-values for which A(a) is finite (exclusive): 0 when A diverges
// for every a > 0, +inf when it is finite for every a > 0.
ExtReal admissible_a_max(const DistributionModel& model, const Deformation& d, Regime r);

// A(a). Closed form when registered for (model, regime); quadrature otherwise.
// Divergence is reported as +inf.
ExtReal deformed_mgf(const DistributionModel& model, double a, const Deformation& d, Regime r);

// A(a) by quadrature only, bypassing the closed-form registry.
ExtReal deformed_mgf_quadrature(const DistributionModel& model, double a,
                                const Deformation& d, Regime r);

// Whether deformed_mgf has a closed form for (model, regime).
bool has_closed_mgf(const DistributionModel& model, Regime r);

double theta_of_a(double a, ExtReal A, const Deformation& d, Regime r);
double phi_of_theta(const ThetaPoint& p, const Deformation& d, Regime r);

// Full evaluation record at a. Throws DivergenceError when A(a) is infinite.
ThetaPoint theta_point(const DistributionModel& model, double a, const Deformation& d,
                       Regime r);

// d theta / d a from the derivative identities, with the expectations evaluated
// by quadrature:
//   CompactSupport: A^{-q} E[exp_{q*}(aX)^{q*}]
//   FatTail:        theta / (a A) E[exp_q(aX)^q]
double theta_derivative(const DistributionModel& model, double a, const Deformation& d,
                        Regime r);

// theta_bar = sup_a theta(a), estimated by geometric probing in a.
ThetaRange theta_range(const DistributionModel& model, const Deformation& d, Regime r);

// a with |theta(a) - target| <= 1e-10 (1 + target), by bisection.
// RangeError when target >= theta_bar, DivergenceError when A is infinite for all a.
double invert_theta(double target_theta, const DistributionModel& model,
                    const Deformation& d, Regime r);

}  // namespace qld
