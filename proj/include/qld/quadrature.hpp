#pragma once

#include <functional>

#include "qld/deformed_math.hpp"

namespace qld {

struct QuadratureOptions {
  double abs_tol = Tolerances::quadrature_abs;
  double rel_tol = Tolerances::quadrature_rel;
  int max_intervals = 5000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

using Integrand = std::function<double(double)>;

// Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
// Throws NumericalError carrying the achieved error estimate when the
// tolerance max(abs_tol, rel_tol*|I|) is not met within max_intervals.
QuadratureResult integrate(const Integrand& f, double lo, double hi,
                           const QuadratureOptions& opts = {});

// Integral over [lo, inf) of an integrand that decays like x^(-decay), decay > 1.
// Uses x = lo + scale*(s^(-k) - 1) on s in (0,1] with k = max(1, 1/(decay-1)),
// which turns the algebraic tail into a bounded integrand near s = 0.
QuadratureResult integrate_to_infinity(const Integrand& f, double lo,
                                       double decay, double scale = 1.0,
                                       const QuadratureOptions& opts = {});

}  // namespace qld
