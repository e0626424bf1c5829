#include "qld/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qld/errors.hpp"
#include "qld/quadrature.hpp"

namespace qld {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

// nu = 3 tail for large x: (1/pi) sum_k (-1)^(k+1) 2k/(2k+1) t^(2k+1), t = sqrt3/x.
// Avoids the cancellation between arctan and the rational term.
double student3_tail_series(double x) {
  const double t = std::numbers::sqrt3 / x;
  const double t2 = t * t;
  double term = t * t2;
  double sum = 0.0;
  for (int k = 1; k <= 40; ++k) {
    const double c = (2.0 * k) / (2.0 * k + 1.0);
    const double add = (k % 2 == 1 ? 1.0 : -1.0) * c * term;
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    term *= t2;
  }
  return sum / std::numbers::pi;
}

double student3_tail_upper(double x) {
  if (x > 10.0) return student3_tail_series(x);
  return 0.5 - std::atan(x / std::numbers::sqrt3) / std::numbers::pi -
         std::numbers::sqrt3 / std::numbers::pi * x / (3.0 + x * x);
}

}  // namespace

double q_exp_tail(double x, const Deformation& d) {
  if (x <= 0.0) return 1.0;
  return exp_q_star(-x, d).value();
}

double q_exp_pdf(double x, const Deformation& d) {
  if (x < 0.0) return 0.0;
  return std::pow(q_exp_tail(x, d), d.q_star());
}

double q_exp_mean(const Deformation& d) { return 1.0 / d.q(); }

double student_t_pdf(double x, int nu) {
  if (nu < 1) throw DomainError("Student-t requires nu >= 1");
  const double v = nu;
  const double norm = std::exp(std::lgamma(0.5 * (v + 1.0)) - std::lgamma(0.5 * v)) /
                      std::sqrt(v * std::numbers::pi);
  return norm * std::pow(1.0 + x * x / v, -0.5 * (v + 1.0));
}

double student_t_tail(double x, int nu) {
  if (nu < 1) throw DomainError("Student-t requires nu >= 1");
  if (x == 0.0) return 0.5;
  if (x < 0.0) return 1.0 - student_t_tail(-x, nu);
  if (x == kInf) return 0.0;
  if (nu == 3) return student3_tail_upper(x);
  const auto r = integrate_to_infinity([nu](double t) { return student_t_pdf(t, nu); }, x,
                                       nu + 1.0, std::max(1.0, x));
  return r.value;
}

DistributionModel DistributionModel::q_exponential(const Deformation& d, double scale) {
  if (!(scale > 0.0 && std::isfinite(scale))) {
    throw DomainError("q-exponential scale must be positive");
  }
  return DistributionModel(QExponential{d, scale});
}

DistributionModel DistributionModel::uniform(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError("uniform model requires finite lo < hi");
  }
  return DistributionModel(Uniform{lo, hi});
}

DistributionModel DistributionModel::student_t(int nu) {
  if (nu < 1) throw DomainError("Student-t requires nu >= 1");
  return DistributionModel(StudentT{nu});
}

std::string DistributionModel::name() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const QExponential& m) {
                   os << "qexp(q=" << m.deformation.q() << ",scale=" << m.scale << ")";
                 },
                 [&](const Uniform& m) { os << "uniform(" << m.lo << "," << m.hi << ")"; },
                 [&](const StudentT& m) { os << "student_t(nu=" << m.nu << ")"; },
             },
             kind_);
  return os.str();
}

double DistributionModel::pdf(double x) const {
  return std::visit(overloaded{
                        [x](const QExponential& m) {
                          return m.scale * q_exp_pdf(m.scale * x, m.deformation);
                        },
                        [x](const Uniform& m) {
                          return (x >= m.lo && x <= m.hi) ? 1.0 / (m.hi - m.lo) : 0.0;
                        },
                        [x](const StudentT& m) { return student_t_pdf(x, m.nu); },
                    },
                    kind_);
}

double DistributionModel::tail(double x) const {
  return std::visit(overloaded{
                        [x](const QExponential& m) {
                          return q_exp_tail(m.scale * x, m.deformation);
                        },
                        [x](const Uniform& m) {
                          if (x <= m.lo) return 1.0;
                          if (x >= m.hi) return 0.0;
                          return (m.hi - x) / (m.hi - m.lo);
                        },
                        [x](const StudentT& m) { return student_t_tail(x, m.nu); },
                    },
                    kind_);
}

double DistributionModel::mean() const {
  return std::visit(overloaded{
                        [](const QExponential& m) {
                          return q_exp_mean(m.deformation) / m.scale;
                        },
                        [](const Uniform& m) { return 0.5 * (m.lo + m.hi); },
                        [](const StudentT& m) {
                          if (m.nu < 2) throw DomainError("Student-t mean requires nu >= 2");
                          return 0.0;
                        },
                    },
                    kind_);
}

Support DistributionModel::support() const {
  return std::visit(overloaded{
                        [](const QExponential&) { return Support{0.0, kInf}; },
                        [](const Uniform& m) { return Support{m.lo, m.hi}; },
                        [](const StudentT&) { return Support{-kInf, kInf}; },
                    },
                    kind_);
}

bool DistributionModel::has_closed_tail() const {
  if (const auto* t = std::get_if<StudentT>(&kind_)) return t->nu == 3;
  return true;
}

bool DistributionModel::has_closed_mean() const {
  if (const auto* t = std::get_if<StudentT>(&kind_)) return t->nu >= 2;
  return true;
}

std::optional<double> DistributionModel::upper_tail_exponent() const {
  return std::visit(overloaded{
                        [](const QExponential& m) -> std::optional<double> {
                          const double q = m.deformation.q();
                          return m.deformation.q_star() / (1.0 - q);
                        },
                        [](const Uniform&) -> std::optional<double> { return std::nullopt; },
                        [](const StudentT& m) -> std::optional<double> { return m.nu + 1.0; },
                    },
                    kind_);
}

std::optional<double> DistributionModel::lower_tail_exponent() const {
  if (const auto* t = std::get_if<StudentT>(&kind_)) return t->nu + 1.0;
  return std::nullopt;
}

double DistributionModel::characteristic_scale() const {
  return std::visit(overloaded{
                        [](const QExponential& m) { return 1.0 / m.scale; },
                        [](const Uniform& m) { return m.hi - m.lo; },
                        [](const StudentT&) { return 1.0; },
                    },
                    kind_);
}

void DistributionModel::fill(Rng& rng, std::span<double> values) const {
  std::visit(overloaded{
                 [&](const QExponential& m) {
                   // Inverse tail: U = eta(s x)  =>  x = (U^{-(1-q)} - 1) / ((1-q) s).
                   const double k = 1.0 - m.deformation.q();
                   const double denom = k * m.scale;
                   for (double& v : values) {
                     v = std::expm1(-k * std::log(rng.uniform_pos())) / denom;
                   }
                 },
                 [&](const Uniform& m) {
                   const double w = m.hi - m.lo;
                   for (double& v : values) v = m.lo + w * rng.uniform();
                 },
                 [&](const StudentT& m) {
                   // Bailey's polar method.
                   const double nu = m.nu;
                   for (double& v : values) {
                     double u, w;
                     do {
                       u = rng.uniform_sym();
                       const double s = rng.uniform_sym();
                       w = u * u + s * s;
                     } while (w > 1.0 || w == 0.0);
                     v = u * std::sqrt(nu * (std::pow(w, -2.0 / nu) - 1.0) / w);
                   }
                 },
             },
             kind_);
}

SampleBatch sample(const DistributionModel& model, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw DomainError("sample count must be positive");
  SampleBatch batch;
  batch.seed = seed;
  batch.count = count;
  batch.values.resize(count);
  Rng rng(seed);
  model.fill(rng, batch.values);
  return batch;
}

}  // namespace qld
