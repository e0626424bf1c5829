#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qld/distributions.hpp"
#include "qld/errors.hpp"
#include "qld/moment_engine.hpp"
#include "qld/random.hpp"

using namespace qld;

namespace {

// A(5) for Student-t(3) in the fat-tail regime, from an independent
// double-exponential quadrature of pdf(x) (1 + (1-q) 5 x)_+^{1/(1-q)}.
constexpr double kStudentA5q060 = 30.809257247380405;
constexpr double kStudentA5q065 = 111.65007184751;

struct Case {
  const char* label;
  DistributionModel model;
  Deformation d;
  Regime r;
  double a_lo;
  double a_hi;
};

std::vector<Case> example_cases() {
  return {
      {"uniform compact", DistributionModel::uniform(), Deformation(0.5), Regime::CompactSupport,
       1e-3, 1.99},
      {"uniform fat", DistributionModel::uniform(), Deformation(0.5), Regime::FatTail, 1e-3, 1e3},
      {"student fat", DistributionModel::student_t(3), Deformation(0.6), Regime::FatTail, 1e-3,
       1e3},
      {"student fat 0.65", DistributionModel::student_t(3), Deformation(0.65), Regime::FatTail,
       1e-2, 1e2},
  };
}

double theta_at(const Case& c, double a) {
  return theta_of_a(a, deformed_mgf(c.model, a, c.d, c.r), c.d, c.r);
}

// Richardson-extrapolated central difference, step kept away from the pole.
double derivative(const Case& c, double a) {
  const ExtReal a_max = admissible_a_max(c.model, c.d, c.r);
  const double room = a_max.is_finite() ? std::min(a, a_max.value() - a) : a;
  const double h = 1e-3 * room;
  const double d1 = (theta_at(c, a + h) - theta_at(c, a - h)) / (2.0 * h);
  const double d2 = (theta_at(c, a + 2.0 * h) - theta_at(c, a - 2.0 * h)) / (4.0 * h);
  return (4.0 * d1 - d2) / 3.0;
}

}  // namespace

TEST_CASE("uniform compact-support values") {
  const auto u = DistributionModel::uniform();
  const Deformation d(0.5);
  const ThetaPoint p = theta_point(u, 1.0, d, Regime::CompactSupport);
  CHECK(p.A.value() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(p.theta == doctest::Approx(std::numbers::sqrt2).epsilon(1e-14));
  CHECK(p.phi == doctest::Approx(2.0 * (std::numbers::sqrt2 - 1.0)).epsilon(1e-14));
  CHECK(p.phi == doctest::Approx(2.0 * (p.theta / p.a - 1.0)).epsilon(1e-14));
  // A = 2/(2-a) on the unit interval at q = 1/2.
  for (double a : {0.1, 0.5, 1.5, 1.9}) {
    CHECK(deformed_mgf(u, a, d, Regime::CompactSupport).value() ==
          doctest::Approx(2.0 / (2.0 - a)).epsilon(1e-13));
  }
}

TEST_CASE("A tends to one as a vanishes") {
  for (const auto& c : example_cases()) {
    CAPTURE(c.label);
    CHECK(deformed_mgf(c.model, 1e-9, c.d, c.r).value() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(theta_at(c, 1e-9) == doctest::Approx(1e-9).epsilon(1e-6));
  }
}

TEST_CASE("closed form and quadrature agree") {
  const auto u = DistributionModel::uniform();
  const auto w = DistributionModel::uniform(-1.0, 3.0);
  for (double q : {0.2, 0.5, 0.8}) {
    const Deformation d(q);
    for (double a : {1e-4, 0.3, 1.0, 0.9 / (1.0 - q)}) {
      CHECK(deformed_mgf(u, a, d, Regime::CompactSupport).value() ==
            doctest::Approx(deformed_mgf_quadrature(u, a, d, Regime::CompactSupport).value())
                .epsilon(1e-9));
      CHECK(deformed_mgf(u, a, d, Regime::FatTail).value() ==
            doctest::Approx(deformed_mgf_quadrature(u, a, d, Regime::FatTail).value())
                .epsilon(1e-9));
      CHECK(deformed_mgf(w, a / 3.0, d, Regime::FatTail).value() ==
            doctest::Approx(deformed_mgf_quadrature(w, a / 3.0, d, Regime::FatTail).value())
                .epsilon(1e-9));
    }
  }
  CHECK(has_closed_mgf(u, Regime::CompactSupport));
  CHECK(!has_closed_mgf(DistributionModel::student_t(3), Regime::FatTail));
}

TEST_CASE("admissible range and divergence") {
  const auto u = DistributionModel::uniform();
  const auto t = DistributionModel::student_t(3);
  const auto qe = DistributionModel::q_exponential(Deformation(0.5));
  CHECK(admissible_a_max(u, Deformation(0.5), Regime::CompactSupport).value() == 2.0);
  CHECK(admissible_a_max(u, Deformation(0.5), Regime::FatTail).is_infinite());
  CHECK(admissible_a_max(t, Deformation(0.5), Regime::CompactSupport).value() == 0.0);
  CHECK(admissible_a_max(t, Deformation(0.6), Regime::FatTail).is_infinite());
  CHECK(admissible_a_max(t, Deformation(0.65), Regime::FatTail).is_infinite());
  CHECK(admissible_a_max(t, Deformation(2.0 / 3.0), Regime::FatTail).value() == 0.0);
  CHECK(admissible_a_max(t, Deformation(0.7), Regime::FatTail).value() == 0.0);
  CHECK(admissible_a_max(qe, Deformation(0.5), Regime::FatTail).value() == 0.0);
  CHECK(deformed_mgf(u, 2.0, Deformation(0.5), Regime::CompactSupport).is_infinite());
  CHECK(deformed_mgf(u, 3.0, Deformation(0.5), Regime::CompactSupport).is_infinite());
  CHECK(deformed_mgf(t, 1.0, Deformation(0.7), Regime::FatTail).is_infinite());
  CHECK_THROWS_AS(theta_point(u, 2.5, Deformation(0.5), Regime::CompactSupport),
                  DivergenceError);
  CHECK_THROWS_AS(theta_of_a(1.0, ExtReal::infinity(), Deformation(0.5), Regime::FatTail),
                  DomainError);
  CHECK_THROWS_AS(theta_of_a(1.0, ExtReal(0.0), Deformation(0.5), Regime::FatTail), DomainError);
  CHECK_THROWS_AS(deformed_mgf(u, 0.0, Deformation(0.5), Regime::FatTail), DomainError);
}

TEST_CASE("Student-t fat-tail A against the reference quadrature") {
  const auto t = DistributionModel::student_t(3);
  CHECK(deformed_mgf(t, 5.0, Deformation(0.6), Regime::FatTail).value() ==
        doctest::Approx(kStudentA5q060).epsilon(1e-10));
  CHECK(deformed_mgf(t, 5.0, Deformation(0.65), Regime::FatTail).value() ==
        doctest::Approx(kStudentA5q065).epsilon(1e-10));
}

TEST_CASE("Student-t fat-tail A against a Monte Carlo average") {
  // exp_q(5X) has tail index 1.2 here, so the average is heavy-tailed and the
  // 3-sigma band uses the sample standard error.
  const auto t = DistributionModel::student_t(3);
  const Deformation d(0.6);
  Rng rng(20140601);
  std::vector<double> buf(1 << 16);
  double s = 0.0, s2 = 0.0;
  const std::uint64_t total = 10'000'000;
  std::uint64_t done = 0;
  while (done < total) {
    const std::size_t m = std::min<std::uint64_t>(buf.size(), total - done);
    t.fill(rng, std::span<double>(buf.data(), m));
    for (std::size_t i = 0; i < m; ++i) {
      const double v = exp_q(5.0 * buf[i], d).value();
      s += v;
      s2 += v * v;
    }
    done += m;
  }
  const double n = static_cast<double>(total);
  const double mean = s / n;
  const double se = std::sqrt((s2 / n - mean * mean) / n);
  CAPTURE(mean);
  CAPTURE(se);
  CHECK(std::abs(mean - deformed_mgf(t, 5.0, d, Regime::FatTail).value()) <= 3.0 * se);
}

TEST_CASE("Phi in each regime") {
  const auto t = DistributionModel::student_t(3);
  const Deformation d(0.6);
  const ThetaPoint p = theta_point(t, 5.0, d, Regime::FatTail);
  CHECK(p.phi == doctest::Approx(ln_q(kStudentA5q060, 1.4)).epsilon(1e-10));
  CHECK(p.theta == doctest::Approx(5.0 / std::pow(kStudentA5q060, 0.4)).epsilon(1e-10));
  ThetaPoint one{1.0, ExtReal(1.0), 1.0, 0.0};
  CHECK(phi_of_theta(one, d, Regime::FatTail) == 0.0);
  CHECK(phi_of_theta(one, d, Regime::CompactSupport) == 0.0);
}

TEST_CASE("theta increases with a at 100 log-spaced points") {
  for (const auto& c : example_cases()) {
    CAPTURE(c.label);
    int bad = 0;
    for (int i = 0; i < 100; ++i) {
      const double a = c.a_lo * std::pow(c.a_hi / c.a_lo, i / 99.0);
      if (!(derivative(c, a) > 0.0)) ++bad;
      if (!(theta_derivative(c.model, a, c.d, c.r) > 0.0)) ++bad;
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("derivative identities match finite differences") {
  for (const auto& c : example_cases()) {
    CAPTURE(c.label);
    double worst = 0.0;
    for (int i = 0; i < 25; ++i) {
      const double a = c.a_lo * 10.0 * std::pow(c.a_hi / (c.a_lo * 10.0), i / 24.0);
      const double fd = derivative(c, a);
      const double id = theta_derivative(c.model, a, c.d, c.r);
      worst = std::max(worst, std::abs(id / fd - 1.0));
    }
    CAPTURE(worst);
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("A increases with a for non-negative support") {
  const auto u = DistributionModel::uniform();
  for (Regime r : {Regime::CompactSupport, Regime::FatTail}) {
    double prev = 1.0;
    for (int i = 1; i <= 50; ++i) {
      const double a = 1.9 * i / 50.0;
      const double A = deformed_mgf(u, a, Deformation(0.5), r).value();
      CHECK(A > prev);
      prev = A;
    }
  }
}

TEST_CASE("theta range verdicts") {
  const auto u = DistributionModel::uniform();
  const auto t = DistributionModel::student_t(3);
  const ThetaRange uc = theta_range(u, Deformation(0.5), Regime::CompactSupport);
  CHECK((uc.theta_bar.is_infinite() || !uc.bounded));
  // theta -> a / sqrt(a^2 E X^2 / 4) = sqrt(12) for the unit uniform at q = 1/2.
  const ThetaRange uf = theta_range(u, Deformation(0.5), Regime::FatTail);
  CHECK(uf.bounded);
  CHECK(uf.theta_bar.value() == doctest::Approx(std::sqrt(12.0)).epsilon(1e-8));
  const ThetaRange tf = theta_range(t, Deformation(0.6), Regime::FatTail);
  CHECK(tf.bounded);
  CHECK(tf.theta_bar.is_finite());
  CHECK(tf.theta_bar.value() > theta_at(example_cases()[2], 1e3));
}

TEST_CASE("theta inversion") {
  const auto u = DistributionModel::uniform();
  const Deformation d5(0.5);
  const double target = theta_of_a(1.0, deformed_mgf(u, 1.0, d5, Regime::CompactSupport), d5,
                                   Regime::CompactSupport);
  CHECK(invert_theta(target, u, d5, Regime::CompactSupport) == doctest::Approx(1.0).epsilon(1e-9));
  // Both vanish together; theta ~ a near 0.
  for (double tiny : {1e-4, 1e-7, 1e-12}) {
    const double a = invert_theta(tiny, u, d5, Regime::CompactSupport);
    const double back = theta_of_a(a, deformed_mgf(u, a, d5, Regime::CompactSupport), d5,
                                   Regime::CompactSupport);
    CHECK(std::abs(back - tiny) <= Tolerances::inversion * (1.0 + tiny));
    CHECK(a <= 2.0 * tiny + Tolerances::inversion);
  }

  const auto t = DistributionModel::student_t(3);
  const Deformation d6(0.6);
  const double bar = theta_range(t, d6, Regime::FatTail).theta_bar.value();
  Rng rng(51);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double tgt = 0.9 * bar * rng.uniform_pos();
    const double a = invert_theta(tgt, t, d6, Regime::FatTail);
    const double back = theta_of_a(a, deformed_mgf(t, a, d6, Regime::FatTail), d6, Regime::FatTail);
    worst = std::max(worst, std::abs(back - tgt) / (1.0 + tgt));
  }
  CHECK(worst < 1e-9);

  CHECK_THROWS_AS(invert_theta(1.01 * bar, t, d6, Regime::FatTail), RangeError);
  CHECK_THROWS_AS(invert_theta(0.5, t, d6, Regime::CompactSupport), DivergenceError);
  CHECK_THROWS_AS(invert_theta(-1.0, t, d6, Regime::FatTail), DomainError);
}
