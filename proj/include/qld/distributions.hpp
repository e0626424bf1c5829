#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qld/deformed_math.hpp"
#include "qld/random.hpp"

namespace qld {

// Tail eta(x) = exp_{q*}(-x) of the unit q*-exponential law; 1 for x <= 0.
double q_exp_tail(double x, const Deformation& d);
// Density [eta(x)]^{q*} on x > 0.
double q_exp_pdf(double x, const Deformation& d);
// E X = 1/q.
double q_exp_mean(const Deformation& d);

// Student-t density with nu degrees of freedom.
double student_t_pdf(double x, int nu);
// P(T >= x). Closed form for nu = 3, quadrature of the density otherwise.
double student_t_tail(double x, int nu);

struct QExponential {
  Deformation deformation;
  double scale = 1.0;
};

struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

struct StudentT {
  int nu = 3;
};

struct Support {
  double lo;  // may be -inf
  double hi;  // may be +inf
};

// An immutable i.i.d. source model.
class DistributionModel {
 public:
  using Kind = std::variant<QExponential, Uniform, StudentT>;

  static DistributionModel q_exponential(const Deformation& d, double scale = 1.0);
  static DistributionModel uniform(double lo = 0.0, double hi = 1.0);
  static DistributionModel student_t(int nu);

  const Kind& kind() const noexcept { return kind_; }
  std::string name() const;

  double pdf(double x) const;
  double tail(double x) const;
  // Throws DomainError when the mean does not exist (Student-t with nu = 1).
  double mean() const;
  Support support() const;

  bool has_closed_tail() const;
  bool has_closed_mean() const;

  // alpha such that pdf(x) ~ C x^(-alpha) as x -> +inf; empty for bounded support.
  std::optional<double> upper_tail_exponent() const;
  // Same as x -> -inf; empty when the support is bounded below.
  std::optional<double> lower_tail_exponent() const;

  // Length over which the bulk of the density lives.
  double characteristic_scale() const;

  // Draw values.size() i.i.d. variates from rng.
  void fill(Rng& rng, std::span<double> values) const;

 private:
  explicit DistributionModel(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

struct SampleBatch {
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::size_t count = 0;
};

// count i.i.d. draws from a single stream seeded with seed.
SampleBatch sample(const DistributionModel& model, std::size_t count, std::uint64_t seed);

}  // namespace qld
