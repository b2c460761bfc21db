#include <doctest.h>

#include <cmath>

#include "phiopt/stats.hpp"

using namespace phiopt;

namespace {

const std::vector<double> kA{27.5, 21.0, 19.0, 23.6, 17.0, 17.9, 16.9, 20.1, 21.9, 22.6, 23.1, 19.6, 19.0, 21.7, 21.4};
const std::vector<double> kB{27.1, 22.0, 20.8, 23.4, 23.4, 23.5, 25.8, 22.0, 24.8, 20.2, 21.9, 22.1, 22.9, 20.5, 24.4};

// N values with the given mean and sample standard deviation.
std::vector<double> synthetic(int n, double mean, double sd) {
  const double a = sd * std::sqrt((n - 1.0) / n);
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(mean + (i % 2 ? a : -a));
  return v;
}

}  // namespace

TEST_CASE("mean and standard deviation") {
  CHECK(sample_mean({1.0, 2.0, 6.0}) == doctest::Approx(3.0));
  CHECK(sample_stddev({1.0, 2.0, 6.0}) == doctest::Approx(std::sqrt(7.0)));
  CHECK(sample_stddev({4.0, 4.0}) == 0.0);
}

TEST_CASE("confidence interval matches the hand formula") {
  RandomStream rng(9);
  for (int n : {2, 10, 99, 100, 250}) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(rng.uniform());
    double m = 0.0;
    for (double x : v) m += x;
    m /= n;
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double se = std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));
    const Interval ci = confidence_interval(v);
    CHECK(0.5 * (ci.lower + ci.upper) == doctest::Approx(m).epsilon(1e-12));
    const double half = 0.5 * (ci.upper - ci.lower);
    if (n >= 100) CHECK(std::abs(half - 1.959963984540054 * se) < 1e-12);
    if (n == 10) CHECK(half == doctest::Approx(2.2621571628540993 * se).epsilon(1e-9));
    if (n < 100) CHECK(half > 1.96 * se);
  }
}

TEST_CASE("reported 3-node interval reconstructs from its standard error") {
  const Interval ci = confidence_interval(synthetic(100, 0.0517, 0.1556));
  CHECK(ci.lower == doctest::Approx(0.0212).epsilon(0).scale(1).epsilon(1e-4));
  CHECK(ci.upper == doctest::Approx(0.0822).epsilon(0).scale(1).epsilon(1e-4));
}

TEST_CASE("too little data is an error") {
  CHECK_THROWS_AS(confidence_interval({1.0}), InsufficientDataError);
  CHECK_THROWS_AS(welch_t_test(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), InsufficientDataError);
  CHECK_THROWS_AS(sample_population(3, 1, 0), InsufficientDataError);
  CHECK_THROWS_AS(sample_population(7, 10, 0), BudgetError);
  const PopulationStats one = summarize({0.5});
  CHECK(std::isnan(one.ci95.lower));
}

TEST_CASE("Welch test matches a textbook fixture") {
  const TestReport r = welch_t_test(kA, kB);
  CHECK(r.t_statistic == doctest::Approx(-2.455356398286006).epsilon(1e-10));
  CHECK(r.p_value == doctest::Approx(0.021378001462866985).epsilon(1e-8));
  CHECK(r.dof == doctest::Approx(24.988529290231416).epsilon(1e-10));

  const std::vector<double> c{17.2, 20.9, 22.6, 18.1, 21.7, 21.4, 23.5, 24.2, 14.7, 21.8};
  const std::vector<double> d{21.5, 22.8, 21.0, 23.0, 21.6, 23.6, 22.5, 20.7, 23.4, 21.8,
                              20.7, 21.7, 21.5, 22.5, 23.6, 21.5, 22.5, 23.5, 21.5, 21.8};
  const TestReport s = welch_t_test(c, d);
  CHECK(s.t_statistic == doctest::Approx(-1.5654335235985037).epsilon(1e-10));
  CHECK(s.p_value == doctest::Approx(0.14884169660532834).epsilon(1e-8));
}

TEST_CASE("Welch test symmetry, scale invariance and monotone p") {
  const TestReport ab = welch_t_test(kA, kB), ba = welch_t_test(kB, kA);
  CHECK(ab.t_statistic == doctest::Approx(-ba.t_statistic));
  CHECK(ab.p_value == doctest::Approx(ba.p_value));
  std::vector<double> a3, b3;
  for (double x : kA) a3.push_back(3.0 * x + 7.0);
  for (double x : kB) b3.push_back(3.0 * x + 7.0);
  CHECK(welch_t_test(a3, b3).t_statistic == doctest::Approx(ab.t_statistic).epsilon(1e-10));
  double last_t = 0.0, last_p = 1.0;
  for (double shift = 0.5; shift < 6.0; shift += 0.5) {
    std::vector<double> moved;
    for (double x : kB) moved.push_back(x + shift);
    const TestReport r = welch_t_test(moved, kA);
    CHECK(r.t_statistic > last_t);
    CHECK(r.p_value < last_p);
    last_t = r.t_statistic;
    last_p = r.p_value;
  }
}

TEST_CASE("identical and constant groups") {
  const TestReport same = welch_t_test(kA, kA);
  CHECK(same.t_statistic == 0.0);
  CHECK(same.p_value == doctest::Approx(1.0));
  const TestReport flat = welch_t_test(std::vector<double>{0.0, 0.0}, std::vector<double>{0.0, 0.0, 0.0});
  CHECK(flat.t_statistic == 0.0);
  CHECK(flat.p_value == 1.0);
  const TestReport apart = welch_t_test(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 1.0});
  CHECK(std::isinf(apart.t_statistic));
  CHECK(apart.t_statistic < 0.0);
  CHECK(apart.p_value == 0.0);
}

TEST_CASE("summary statistics of the 3 versus 4 node comparison give t near -3.40") {
  const double se3 = (0.0822 - 0.0212) / 2.0 / 1.96, se4 = (0.2328 - 0.1093) / 2.0 / 1.96;
  const double expected = (0.0517 - 0.1711) / std::sqrt(se3 * se3 + se4 * se4);
  const TestReport r = welch_t_test(synthetic(100, 0.0517, se3 * 10.0), synthetic(100, 0.1711, se4 * 10.0));
  CHECK(r.t_statistic == doctest::Approx(expected).epsilon(1e-10));
  CHECK(std::abs(r.t_statistic - -3.40) < 0.01);
  CHECK(std::abs(r.t_statistic - -3.38) <= 0.05);
  CHECK(r.p_value < 0.01);
}

TEST_CASE("population sampling is reproducible and thread independent") {
  const PopulationStats a = sample_population(3, 24, 42);
  const PopulationStats b = sample_population(3, 24, 42);
  const PopulationStats c = sample_population(3, 24, 42, PopulationOptions{SamplingMode::Binary, 6, 3});
  CHECK(a.phi_values == b.phi_values);
  CHECK(a.phi_values == c.phi_values);
  CHECK(a.sample_size == 24);
  CHECK(a.node_count == 3);
  CHECK(a.phi_values.size() + static_cast<std::size_t>(a.infeasible_count) == 24u);
  CHECK(a.infeasible_rate == doctest::Approx(a.infeasible_count / 24.0));
  for (double v : a.phi_values) CHECK(v >= 0.0);
  CHECK(a.mean == doctest::Approx(sample_mean(a.phi_values)));
  CHECK(a.values_with_zeros().size() == 24u);
  CHECK(sample_population(3, 24, 43).phi_values != a.phi_values);
}

TEST_CASE("inference experiment reports both aggregations") {
  const InferenceReport r = run_inference_experiment({2, 20}, {3, 20}, 7);
  CHECK(r.feasible_only.group_a.node_count == 2);
  CHECK(r.feasible_only.group_b.node_count == 3);
  CHECK(r.with_zeros.group_a.sample_size == 20);
  CHECK(std::isfinite(r.feasible_only.p_value));
  const InferenceReport same = run_inference_experiment({3, 10}, {3, 10}, 7);
  CHECK(same.feasible_only.group_a.phi_values != same.feasible_only.group_b.phi_values);
}
