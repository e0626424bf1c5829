#pragma once

#include <cmath>
#include <utility>

namespace qld {

struct GoldenResult {
  double x;
  double fx;
};

// Maximize a unimodal f on [lo, hi] until (hi - lo) <= rel_tol * |midpoint|.
template <class F>
GoldenResult golden_section_maximize(F&& f, double lo, double hi, double rel_tol,
                                     int max_iter = 400) {
  constexpr double inv_phi = 0.6180339887498948482;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < max_iter; ++i) {
    if (hi - lo <= rel_tol * std::abs(0.5 * (lo + hi))) break;
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return fc >= fd ? GoldenResult{c, fc} : GoldenResult{d, fd};
}

}  // namespace qld
