#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "phiopt/core.hpp"
#include "phiopt/random.hpp"

namespace phiopt {

/// Binary state of every node in a system, node 0 first.
class SystemState {
 public:
  SystemState() = default;
  explicit SystemState(std::vector<std::uint8_t> bits);
  SystemState(std::initializer_list<int> bits);

  int size() const { return static_cast<int>(bits_.size()); }
  int operator[](int i) const { return bits_[i]; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const SystemState&, const SystemState&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Row index of `state` under the little-endian convention.
StateIndex state_index(const SystemState& state);
SystemState index_to_state(StateIndex index, int nodes);

/// State-by-node transition probability matrix: entry (r, j) is the
/// probability that node j is ON at t+1 given the system was in state r at t.
class Tpm {
 public:
  Tpm() = default;

  int node_count() const { return nodes_; }
  int state_count() const { return static_cast<int>(p_.rows()); }
  double operator()(StateIndex row, int node) const { return p_(row, node); }
  const Eigen::MatrixXd& matrix() const { return p_; }
  bool is_binary() const;

  friend bool operator==(const Tpm& a, const Tpm& b) { return a.p_ == b.p_; }

 private:
  explicit Tpm(Eigen::MatrixXd p) : nodes_(static_cast<int>(p.cols())), p_(std::move(p)) {}
  friend Tpm validate_tpm(const Eigen::Ref<const Eigen::MatrixXd>& matrix);

  int nodes_ = 0;
  Eigen::MatrixXd p_;
};

/// Entry (i, j) is 1 iff node j's next state depends on node i.
using ConnectivityMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

struct Network {
  Tpm tpm;
  ConnectivityMatrix cm;

  int node_count() const { return tpm.node_count(); }
};

struct FeasibilityReport {
  bool feasible = false;
  std::optional<SystemState> first_feasible_state;
  int states_tried = 0;
};

/// Accepts exactly the 2^D x D matrices (D >= 1) with entries in [0, 1].
/// Throws ShapeError or RangeError.
Tpm validate_tpm(const Eigen::Ref<const Eigen::MatrixXd>& matrix);

ConnectivityMatrix derive_cm(const Tpm& tpm);

/// Builds the network with its dependency-derived connectivity matrix.
Network make_network(const Tpm& tpm);

/// States with nonzero probability of being produced from some source state.
std::vector<SystemState> reachable_states(const Network& network);

bool is_reachable(const Network& network, StateIndex state);

/// Scans states in ascending index order for the first one at which Phi is
/// well defined.
FeasibilityReport first_feasible_state(const Network& network);

enum class SamplingMode { Binary, Probabilistic };

/// Draws every entry independently: a fair coin in binary mode, uniform on
/// [0, 1) in probabilistic mode.
Tpm sample_tpm(int nodes, RandomStream& rng, SamplingMode mode = SamplingMode::Binary);

/// k-th of `grid_size` evenly spaced integers over [0, 2^(2^D * D)), unpacked
/// row-major (bit 0 = row 0 / node 0, bit 1 = row 0 / node 1, ...).
Tpm grid_tpm(int nodes, std::uint64_t k, std::uint64_t grid_size);

/// Relabels nodes: node i of the input becomes node perm[i] of the output.
Tpm permute_tpm(const Tpm& tpm, std::span<const int> perm);
SystemState permute_state(const SystemState& state, std::span<const int> perm);
NodeSet permute_nodes(NodeSet set, std::span<const int> perm);

}  // namespace phiopt
