#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "phiopt/network.hpp"
#include "phiopt/system.hpp"

namespace phiopt {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

struct PopulationStats {
  int node_count = 0;
  int sample_size = 0;          // total draws
  std::vector<double> phi_values;  // feasible draws only
  int infeasible_count = 0;
  double mean = 0.0;  // over feasible draws
  Interval ci95;
  double infeasible_rate = 0.0;
  // Same figures with every infeasible draw counted as phi = 0.
  double mean_with_zeros = 0.0;
  Interval ci95_with_zeros;

  std::vector<double> values_with_zeros() const;
};

struct TestReport {
  double t_statistic = 0.0;
  double p_value = 1.0;
  double dof = 0.0;
  PopulationStats group_a;
  PopulationStats group_b;
};

double sample_mean(const std::vector<double>& values);
double sample_stddev(const std::vector<double>& values);

/// mean +- z s / sqrt(N) for N >= 100, Student t quantile below.
/// Throws InsufficientDataError for N < 2.
Interval confidence_interval(const std::vector<double>& values, double level = 0.95);

/// Aggregates raw per-group values (node_count and infeasible fields zero).
PopulationStats summarize(const std::vector<double>& values, int node_count = 0, int infeasible = 0);

/// Two-sided Welch test of equal means.
TestReport welch_t_test(const std::vector<double>& a, const std::vector<double>& b);
TestReport welch_t_test(const PopulationStats& a, const PopulationStats& b);

struct PopulationOptions {
  SamplingMode mode = SamplingMode::Binary;
  int max_nodes = kDefaultMaxNodes;
  int threads = 1;
};

/// Draw i uses its own stream derived from (seed, nodes, i), so results do
/// not depend on the thread count.
PopulationStats sample_population(int nodes, int samples, std::uint64_t seed, const PopulationOptions& options = {});

struct GroupSpec {
  int nodes = 0;
  int samples = 0;
};

struct InferenceReport {
  TestReport feasible_only;
  TestReport with_zeros;  // infeasible draws counted as phi = 0
};

InferenceReport run_inference_experiment(const GroupSpec& a, const GroupSpec& b, std::uint64_t seed,
                                         const PopulationOptions& options = {});

}  // namespace phiopt
