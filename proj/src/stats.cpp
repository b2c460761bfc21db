#include "phiopt/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

namespace phiopt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_pair(const std::vector<double>& values) {
  if (values.size() < 2)
    throw InsufficientDataError("need at least 2 values, got " + std::to_string(values.size()));
}

Interval interval_or_nan(const std::vector<double>& values) {
  if (values.size() < 2) return {kNaN, kNaN};
  return confidence_interval(values);
}

}  // namespace

std::vector<double> PopulationStats::values_with_zeros() const {
  std::vector<double> out = phi_values;
  out.resize(phi_values.size() + static_cast<std::size_t>(infeasible_count), 0.0);
  return out;
}

double sample_mean(const std::vector<double>& values) {
  if (values.empty()) return kNaN;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_stddev(const std::vector<double>& values) {
  require_pair(values);
  const double m = sample_mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

Interval confidence_interval(const std::vector<double>& values, double level) {
  require_pair(values);
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("confidence level must lie in (0, 1)");
  const auto n = static_cast<double>(values.size());
  const double m = sample_mean(values);
  const double se = sample_stddev(values) / std::sqrt(n);
  const double tail = 0.5 + level / 2.0;
  const double z = values.size() >= 100 ? boost::math::quantile(boost::math::normal_distribution<>(), tail)
                                        : boost::math::quantile(boost::math::students_t_distribution<>(n - 1), tail);
  return {m - z * se, m + z * se};
}

PopulationStats summarize(const std::vector<double>& values, int node_count, int infeasible) {
  PopulationStats s;
  s.node_count = node_count;
  s.phi_values = values;
  s.infeasible_count = infeasible;
  s.sample_size = static_cast<int>(values.size()) + infeasible;
  s.infeasible_rate = s.sample_size ? static_cast<double>(infeasible) / s.sample_size : 0.0;
  s.mean = sample_mean(values);
  s.ci95 = interval_or_nan(values);
  const auto padded = s.values_with_zeros();
  s.mean_with_zeros = sample_mean(padded);
  s.ci95_with_zeros = interval_or_nan(padded);
  return s;
}

TestReport welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  return welch_t_test(summarize(a), summarize(b));
}

TestReport welch_t_test(const PopulationStats& a, const PopulationStats& b) {
  const auto& x = a.phi_values;
  const auto& y = b.phi_values;
  require_pair(x);
  require_pair(y);
  TestReport report{0.0, 1.0, 0.0, a, b};
  const double va = std::pow(sample_stddev(x), 2) / static_cast<double>(x.size());
  const double vb = std::pow(sample_stddev(y), 2) / static_cast<double>(y.size());
  const double diff = sample_mean(x) - sample_mean(y);
  const double se2 = va + vb;
  if (se2 == 0.0) {
    report.dof = static_cast<double>(x.size() + y.size() - 2);
    if (diff != 0.0) {
      report.t_statistic = std::copysign(std::numeric_limits<double>::infinity(), diff);
      report.p_value = 0.0;
    }
    return report;
  }
  report.t_statistic = diff / std::sqrt(se2);
  report.dof = se2 * se2 /
               (va * va / static_cast<double>(x.size() - 1) + vb * vb / static_cast<double>(y.size() - 1));
  const boost::math::students_t_distribution<> dist(report.dof);
  report.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(report.t_statistic))));
  return report;
}

PopulationStats sample_population(int nodes, int samples, std::uint64_t seed, const PopulationOptions& options) {
  if (samples < 2) throw InsufficientDataError("a population needs at least 2 samples, got " + std::to_string(samples));
  if (nodes > options.max_nodes)
    throw BudgetError("population has " + std::to_string(nodes) + " nodes, the limit is " +
                      std::to_string(options.max_nodes));
  const PhiOptions phi_options{options.max_nodes};
  std::vector<std::optional<double>> outcome(static_cast<std::size_t>(samples));
  const auto draw = [&](int i) {
    RandomStream rng = RandomStream::derive(seed, static_cast<std::uint64_t>(nodes), static_cast<std::uint64_t>(i));
    if (auto r = phi_of_tpm(sample_tpm(nodes, rng, options.mode), phi_options)) outcome[i] = r->phi;
  };
  const int workers = std::clamp(options.threads, 1, samples);
  if (workers == 1) {
    for (int i = 0; i < samples; ++i) draw(i);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int i = w; i < samples; i += workers) draw(i);
      });
  }
  std::vector<double> values;
  int infeasible = 0;
  for (const auto& o : outcome) {
    if (o)
      values.push_back(*o);
    else
      ++infeasible;
  }
  return summarize(values, nodes, infeasible);
}

InferenceReport run_inference_experiment(const GroupSpec& a, const GroupSpec& b, std::uint64_t seed,
                                         const PopulationOptions& options) {
  // Equal node counts would otherwise share substreams.
  const std::uint64_t seed_b = a.nodes == b.nodes ? mix_seed(seed ^ 0x5bd1e995u) : seed;
  const PopulationStats ga = sample_population(a.nodes, a.samples, seed, options);
  const PopulationStats gb = sample_population(b.nodes, b.samples, seed_b, options);
  InferenceReport out;
  out.feasible_only = welch_t_test(ga, gb);
  out.with_zeros = welch_t_test(ga.values_with_zeros(), gb.values_with_zeros());
  out.with_zeros.group_a = ga;
  out.with_zeros.group_b = gb;
  return out;
}

}  // namespace phiopt
