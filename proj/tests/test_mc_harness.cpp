#include <doctest.h>

#include <cmath>
#include <vector>

#include "qld/distributions.hpp"
#include "qld/errors.hpp"
#include "qld/mc_harness.hpp"
#include "qld/rate_bounds.hpp"

using namespace qld;

TEST_CASE("single summand reproduces the closed tail") {
  const Deformation d(0.5);
  const auto qe = DistributionModel::q_exponential(d);
  const MCEstimate e = estimate_tail_of_mean(qe, 1, 2.0, {1'000'000, 7, 4});
  CHECK(std::abs(e.p_hat - 0.25) <= 3.0 * e.std_error);
  CHECK(e.std_error == doctest::Approx(std::sqrt(e.p_hat * (1.0 - e.p_hat) / 1e6)).epsilon(1e-14));
  CHECK(e.samples == 1'000'000);
  CHECK(e.seed == 7);
  CHECK(e.n == 1);
  CHECK(e.x == 2.0);
  CHECK(estimate_tail_of_mean(qe, 1, -1.0, {10'000, 7, 1}).p_hat == 1.0);
}

TEST_CASE("rule of three when nothing exceeds") {
  const auto u = DistributionModel::uniform();
  const MCEstimate e = estimate_tail_of_mean(u, 3, 1.5, {30'000, 1, 1});
  CHECK(e.p_hat == 0.0);
  CHECK(e.std_error == 0.0);
  CHECK(e.upper_3sigma() == doctest::Approx(1e-4));
}

TEST_CASE("identical results for any worker count") {
  const auto t = DistributionModel::student_t(3);
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(-1.0 + 0.5 * i);
  const MCOptions base{300'000, 123, 1};
  const auto ref = estimate_curve(t, 5, grid, base);
  for (unsigned w : {2u, 3u, 8u}) {
    MCOptions o = base;
    o.workers = w;
    const auto got = estimate_curve(t, 5, grid, o);
    REQUIRE(got.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(got[i].p_hat == ref[i].p_hat);
      CHECK(got[i].std_error == ref[i].std_error);
    }
  }
  const auto again = estimate_curve(t, 5, grid, base);
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(again[i].p_hat == ref[i].p_hat);
  const MCEstimate single = estimate_tail_of_mean(t, 5, grid[7], base);
  CHECK(single.p_hat == ref[7].p_hat);
}

TEST_CASE("curve is non-increasing and centred for symmetric models") {
  const auto t = DistributionModel::student_t(3);
  std::vector<double> grid;
  for (int i = 0; i < 41; ++i) grid.push_back(-2.0 + 0.1 * i);
  const auto c = estimate_curve(t, 50, grid, {200'000, 5, 4});
  for (std::size_t i = 1; i < c.size(); ++i) CHECK(c[i].p_hat <= c[i - 1].p_hat);
  CHECK(std::abs(c[20].p_hat - 0.5) < 0.01);
}

TEST_CASE("coverage over repeated seeds") {
  const Deformation d(0.5);
  const auto qe = DistributionModel::q_exponential(d);
  const std::vector<double> grid = {0.5, 2.0, 6.0};
  int covered = 0, total = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto c = estimate_curve(qe, 1, grid, {20'000, 1000 + s, 1});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      ++total;
      if (std::abs(c[i].p_hat - q_exp_tail(grid[i], d)) <= 4.0 * c[i].std_error) ++covered;
    }
  }
  CAPTURE(covered);
  CHECK(covered >= 0.99 * total);
}

TEST_CASE("sandwich at n = 5") {
  const auto qe = DistributionModel::q_exponential(Deformation(0.5));
  const MCEstimate e = estimate_tail_of_mean(qe, 5, 4.0, {10'000'000, 17, 8});
  CHECK(lower_bound_sum(4.0, 5, qe) <= e.p_hat + 3.0 * e.std_error);
  CHECK(e.p_hat <= 1.0);
}

TEST_CASE("one large summand dominates far in the tail") {
  const Deformation d(0.5);
  const auto qe = DistributionModel::q_exponential(d);
  const MCEstimate e = estimate_tail_of_mean(qe, 5, 50.0, {10'000'000, 19, 8});
  const double single = 5.0 * q_exp_tail(250.0, d);
  CAPTURE(e.p_hat);
  CHECK(std::abs(e.p_hat / single - 1.0) <= 0.15);
}

TEST_CASE("argument validation") {
  const auto u = DistributionModel::uniform();
  CHECK_THROWS_AS(estimate_tail_of_mean(u, 0, 0.5, {10'000, 1, 1}), DomainError);
  CHECK_THROWS_AS(estimate_tail_of_mean(u, 1, 0.5, {999, 1, 1}), DomainError);
  const std::vector<double> bad = {0.5, 0.4};
  CHECK_THROWS_AS(estimate_curve(u, 1, bad, {10'000, 1, 1}), DomainError);
  CHECK(estimate_curve(u, 1, std::vector<double>{}, {10'000, 1, 1}).empty());
}
