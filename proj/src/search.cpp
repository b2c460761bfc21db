#include "phiopt/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

namespace phiopt {

namespace {

struct Candidate {
  int iteration = 0;
  int dimension = 0;
  Tpm tpm;
  std::optional<PhiEvaluation> outcome;
  double elapsed = 0.0;
};

void evaluate(Candidate& c, const PhiOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  c.outcome = phi_of_tpm(c.tpm, options);
  c.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void evaluate_all(std::vector<Candidate>& batch, const PhiOptions& options, int threads) {
  const int workers = std::clamp(threads, 1, static_cast<int>(batch.size()));
  if (workers == 1) {
    for (auto& c : batch) evaluate(c, options);
    return;
  }
  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < batch.size(); i += workers) evaluate(batch[i], options);
    });
}

// Appends the batch in iteration order and returns its records.
std::vector<EvalRecord> absorb(std::vector<Candidate>& batch, SearchResult& result) {
  std::vector<EvalRecord> records;
  for (auto& c : batch) {
    EvalRecord rec{c.iteration, c.dimension, c.outcome.has_value(), std::nullopt, c.elapsed};
    if (c.outcome) {
      rec.phi = c.outcome->phi;
      if (c.outcome->phi > result.best_phi) {
        result.best_phi = c.outcome->phi;
        result.best_tpm = c.tpm;
        result.best_state = c.outcome->state;
      }
    }
    result.trajectory.push_back(rec);
    records.push_back(rec);
  }
  return records;
}

RandomStream dimension_stream(const SearchConfig& config, int iteration) {
  return RandomStream::derive(config.seed, static_cast<std::uint64_t>(iteration), 0);
}

RandomStream matrix_stream(const SearchConfig& config, int iteration) {
  return RandomStream::derive(config.seed, static_cast<std::uint64_t>(iteration), 1);
}

SearchResult sampled_search(const SearchConfig& config, DimensionPrior prior, bool adapt) {
  validate(config);
  const PhiOptions options{config.max_nodes};
  SearchResult result;
  result.prior_history.push_back(prior);
  for (int start = 0; start < config.total_iters; start += config.batch_size) {
    const int stop = std::min(config.total_iters, start + config.batch_size);
    std::vector<Candidate> batch;
    for (int i = start; i < stop; ++i) {
      RandomStream pick = dimension_stream(config, i);
      RandomStream fill = matrix_stream(config, i);
      const int d = sample_dimension(prior, pick);
      batch.push_back({i, d, sample_tpm(d, fill, config.mode), std::nullopt, 0.0});
    }
    evaluate_all(batch, options, config.threads);
    const auto records = absorb(batch, result);
    if (adapt) {
      prior = update_prior(prior, config.learning_rate, config.smoothing, records);
      result.prior_history.push_back(prior);
    }
  }
  return result;
}

}  // namespace

void validate(const SearchConfig& config) {
  if (config.d_min < 1 || config.d_min > config.d_max)
    throw ConfigError("node range must satisfy 1 <= min <= max");
  if (config.d_max > config.max_nodes)
    throw BudgetError("search reaches " + std::to_string(config.d_max) + " nodes, the limit is " +
                      std::to_string(config.max_nodes));
  if (config.total_iters < 1) throw ConfigError("iteration budget must be positive");
  if (config.batch_size < 1 || config.batch_size > config.total_iters)
    throw ConfigError("batch size must lie in [1, iterations]");
  if (!(config.learning_rate >= 0.0)) throw ConfigError("learning rate must be nonnegative");
  if (!(config.smoothing >= 0.0 && config.smoothing < 0.5)) throw ConfigError("smoothing must lie in [0, 0.5)");
  if (!config.initial_prior.empty()) {
    if (static_cast<int>(config.initial_prior.size()) != config.dimension_count())
      throw ConfigError("prior has " + std::to_string(config.initial_prior.size()) + " entries for " +
                        std::to_string(config.dimension_count()) + " dimensions");
    double sum = 0.0;
    for (double p : config.initial_prior) {
      if (!(p >= 0.0)) throw ConfigError("prior entries must be nonnegative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("prior must sum to 1");
  }
}

DimensionPrior initial_prior(const SearchConfig& config) {
  DimensionPrior prior{config.d_min, {}};
  const int k = config.dimension_count();
  if (config.initial_prior.empty())
    prior.theta = Eigen::VectorXd::Constant(k, 1.0 / k);
  else
    prior.theta = Eigen::Map<const Eigen::VectorXd>(config.initial_prior.data(), k);
  return prior;
}

std::vector<double> SearchResult::best_so_far() const {
  std::vector<double> out;
  double best = 0.0;
  for (const auto& rec : trajectory) {
    if (rec.phi) best = std::max(best, *rec.phi);
    out.push_back(best);
  }
  return out;
}

int sample_dimension(const DimensionPrior& prior, RandomStream& rng) {
  const double u = rng.uniform() * prior.theta.sum();
  double acc = 0.0;
  const auto k = prior.theta.size();
  for (Eigen::Index i = 0; i < k; ++i) {
    acc += prior.theta[i];
    if (u < acc) return prior.d_min + static_cast<int>(i);
  }
  // u landed on the rounding sliver past the last cumulative sum
  for (Eigen::Index i = k - 1; i >= 0; --i)
    if (prior.theta[i] > 0.0) return prior.d_min + static_cast<int>(i);
  return prior.d_min;
}

Eigen::VectorXd rank_likelihood(const std::vector<EvalRecord>& batch, double mu, int d_min, int d_max) {
  const int k = d_max - d_min + 1;
  Eigen::VectorXd factors = Eigen::VectorXd::Ones(k);
  // Score per sampled dimension: best feasible phi, or -1 when only infeasible.
  std::vector<std::optional<double>> score(k);
  for (const auto& rec : batch) {
    if (rec.dimension < d_min || rec.dimension > d_max) continue;
    auto& s = score[rec.dimension - d_min];
    const double v = rec.phi ? *rec.phi : -1.0;
    s = s ? std::max(*s, v) : v;
  }
  std::vector<int> sampled;
  for (int i = 0; i < k; ++i)
    if (score[i]) sampled.push_back(i);
  const auto m = static_cast<int>(sampled.size());
  if (m == 0) return factors;
  std::stable_sort(sampled.begin(), sampled.end(), [&](int a, int b) { return *score[a] < *score[b]; });
  Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(m, -1.0, 1.0);
  if (m == 1) grid[0] = 1.0;
  for (int lo = 0; lo < m;) {
    int hi = lo;
    while (hi + 1 < m && *score[sampled[hi + 1]] == *score[sampled[lo]]) ++hi;
    const double r = grid.segment(lo, hi - lo + 1).mean();
    for (int t = lo; t <= hi; ++t) factors[sampled[t]] = std::max(0.01, 1.0 + 0.2 * mu * r);
    lo = hi + 1;
  }
  return factors;
}

DimensionPrior update_prior(const DimensionPrior& prior, double mu, double kappa,
                            const std::vector<EvalRecord>& batch) {
  DimensionPrior out = prior;
  out.theta = prior.theta.cwiseProduct(rank_likelihood(batch, mu, prior.d_min, prior.d_max()));
  out.theta /= out.theta.sum();
  if (out.theta.size() > 1) {
    out.theta = out.theta.cwiseMax(kappa).cwiseMin(1.0 - kappa);
    out.theta /= out.theta.sum();
  }
  return out;
}

SearchResult prior_guided_search(const SearchConfig& config) {
  validate(config);
  return sampled_search(config, initial_prior(config), true);
}

SearchResult random_search(const SearchConfig& config) {
  validate(config);
  SearchConfig uniform = config;
  uniform.initial_prior.clear();
  return sampled_search(uniform, initial_prior(uniform), false);
}

SearchResult grid_search(const SearchConfig& config) {
  validate(config);
  const PhiOptions options{config.max_nodes};
  const int k = config.dimension_count();
  SearchResult result;
  int iteration = 0;
  for (int i = 0; i < k; ++i) {
    const int d = config.d_min + i;
    const int share = config.total_iters / k + (i < config.total_iters % k ? 1 : 0);
    std::vector<Candidate> batch;
    for (int pos = 0; pos < share; ++pos)
      batch.push_back({iteration++, d, grid_tpm(d, static_cast<std::uint64_t>(pos), static_cast<std::uint64_t>(share)),
                       std::nullopt, 0.0});
    evaluate_all(batch, options, config.threads);
    absorb(batch, result);
  }
  return result;
}

SearchMethod parse_method(const std::string& name) {
  if (name == "prior") return SearchMethod::Prior;
  if (name == "random") return SearchMethod::Random;
  if (name == "grid") return SearchMethod::Grid;
  throw ConfigError("unknown search method '" + name + "'");
}

const char* to_string(SearchMethod method) {
  switch (method) {
    case SearchMethod::Prior:
      return "prior";
    case SearchMethod::Random:
      return "random";
    case SearchMethod::Grid:
      return "grid";
  }
  return "?";
}

SearchResult run_search(SearchMethod method, const SearchConfig& config) {
  switch (method) {
    case SearchMethod::Prior:
      return prior_guided_search(config);
    case SearchMethod::Random:
      return random_search(config);
    case SearchMethod::Grid:
      return grid_search(config);
  }
  throw ConfigError("unknown search method");
}

std::uint64_t repetition_seed(std::uint64_t seed, SearchMethod method, int rep) {
  return RandomStream::derive(seed, static_cast<std::uint64_t>(method) + 1, static_cast<std::uint64_t>(rep)).bits();
}

}  // namespace phiopt
