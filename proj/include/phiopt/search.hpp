#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "phiopt/network.hpp"
#include "phiopt/random.hpp"
#include "phiopt/system.hpp"

namespace phiopt {

inline constexpr double kDefaultSmoothing = 0.02;
inline constexpr std::uint64_t kDefaultSeed = 20230101;

struct SearchConfig {
  int d_min = 3;
  int d_max = 4;
  int total_iters = 50;
  int batch_size = 5;
  double learning_rate = 0.1;
  double smoothing = kDefaultSmoothing;
  std::vector<double> initial_prior;  // empty means uniform
  std::uint64_t seed = 0;
  SamplingMode mode = SamplingMode::Binary;
  int max_nodes = kDefaultMaxNodes;
  int threads = 1;

  int dimension_count() const { return d_max - d_min + 1; }
};

/// Throws ConfigError on an inconsistent config and BudgetError when d_max
/// exceeds max_nodes.
void validate(const SearchConfig& config);

/// Multinomial over node counts d_min..d_max.
struct DimensionPrior {
  int d_min = 0;
  Eigen::VectorXd theta;

  int d_max() const { return d_min + static_cast<int>(theta.size()) - 1; }
  double mass(int nodes) const { return theta[nodes - d_min]; }
};

DimensionPrior initial_prior(const SearchConfig& config);

struct EvalRecord {
  int iteration = 0;
  int dimension = 0;
  bool feasible = false;
  std::optional<double> phi;
  double elapsed = 0.0;
};

struct SearchResult {
  double best_phi = 0.0;
  std::optional<Tpm> best_tpm;
  std::optional<SystemState> best_state;
  std::vector<EvalRecord> trajectory;
  std::vector<DimensionPrior> prior_history;

  /// Running maximum of feasible phi, 0 before the first feasible draw.
  std::vector<double> best_so_far() const;
};

int sample_dimension(const DimensionPrior& prior, RandomStream& rng);

/// Per-dimension factor 1 + 0.2 mu r, where r places the batch-best phi of
/// each sampled dimension on an even grid over [-1, 1]. Tied dimensions share
/// their mean grid value; unsampled dimensions get 1.
Eigen::VectorXd rank_likelihood(const std::vector<EvalRecord>& batch, double mu, int d_min, int d_max);

DimensionPrior update_prior(const DimensionPrior& prior, double mu, double kappa,
                            const std::vector<EvalRecord>& batch);

SearchResult prior_guided_search(const SearchConfig& config);

/// Uniform dimension, no prior updates.
SearchResult random_search(const SearchConfig& config);

/// Deterministic: T split evenly over the dimensions, extra iterations going
/// to the smallest ones; dimension d uses grid_tpm positions 0..T_d-1.
SearchResult grid_search(const SearchConfig& config);

enum class SearchMethod { Prior, Random, Grid };

SearchMethod parse_method(const std::string& name);
const char* to_string(SearchMethod method);

SearchResult run_search(SearchMethod method, const SearchConfig& config);

/// Seed of one repetition; methods and repetitions get independent streams.
std::uint64_t repetition_seed(std::uint64_t seed, SearchMethod method, int rep);

}  // namespace phiopt
