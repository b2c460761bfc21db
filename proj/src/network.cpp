#include "phiopt/network.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <sstream>

namespace phiopt {

SystemState::SystemState(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_)
    if (b > 1) throw RangeError("state entries must be 0 or 1");
}

SystemState::SystemState(std::initializer_list<int> bits) {
  bits_.reserve(bits.size());
  for (int b : bits) {
    if (b != 0 && b != 1) throw RangeError("state entries must be 0 or 1");
    bits_.push_back(static_cast<std::uint8_t>(b));
  }
}

StateIndex state_index(const SystemState& state) {
  StateIndex idx = 0;
  for (int i = 0; i < state.size(); ++i)
    if (state[i]) idx |= StateIndex{1} << i;
  return idx;
}

SystemState index_to_state(StateIndex index, int nodes) {
  std::vector<std::uint8_t> bits(nodes);
  for (int i = 0; i < nodes; ++i) bits[i] = (index >> i) & 1u;
  return SystemState(std::move(bits));
}

bool Tpm::is_binary() const {
  return (p_.array() == 0.0 || p_.array() == 1.0).all();
}

Tpm validate_tpm(const Eigen::Ref<const Eigen::MatrixXd>& matrix) {
  const auto rows = matrix.rows();
  const auto cols = matrix.cols();
  if (cols < 1 || cols > kMaxNodes) {
    std::ostringstream msg;
    msg << "TPM must have between 1 and " << kMaxNodes << " columns, got " << cols;
    throw ShapeError(msg.str());
  }
  if (rows != (Eigen::Index{1} << cols)) {
    std::ostringstream msg;
    msg << "TPM with " << cols << " columns needs 2^" << cols << " = " << (1 << cols)
        << " rows, got " << rows;
    throw ShapeError(msg.str());
  }
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double v = matrix(r, c);
      if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream msg;
        msg << "TPM entry (" << r << ", " << c << ") = " << v << " is outside [0, 1]";
        throw RangeError(msg.str());
      }
    }
  return Tpm(Eigen::MatrixXd(matrix));
}

ConnectivityMatrix derive_cm(const Tpm& tpm) {
  const int n = tpm.node_count();
  ConnectivityMatrix cm = ConnectivityMatrix::Zero(n, n);
  const auto& p = tpm.matrix();
  for (StateIndex r = 0; r < static_cast<StateIndex>(tpm.state_count()); ++r)
    for (int i = 0; i < n; ++i) {
      const StateIndex flipped = r ^ (StateIndex{1} << i);
      if (flipped < r) continue;
      for (int j = 0; j < n; ++j)
        if (p(r, j) != p(flipped, j)) cm(i, j) = 1;
    }
  return cm;
}

Network make_network(const Tpm& tpm) { return Network{tpm, derive_cm(tpm)}; }

bool is_reachable(const Network& network, StateIndex state) {
  const auto& p = network.tpm.matrix();
  const int n = network.node_count();
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) {
      const double on = p(r, j);
      ok = ((state >> j) & 1u) ? on > 0.0 : on < 1.0;
    }
    if (ok) return true;
  }
  return false;
}

std::vector<SystemState> reachable_states(const Network& network) {
  std::vector<SystemState> out;
  const int n = network.node_count();
  for (StateIndex s = 0; s < (StateIndex{1} << n); ++s)
    if (is_reachable(network, s)) out.push_back(index_to_state(s, n));
  return out;
}

// Reachability is the only way Phi can be undefined for the whole system: a
// reachable state gives every mechanism node a positive-probability past, so
// every cause repertoire normalizes (also under any unidirectional cut).
FeasibilityReport first_feasible_state(const Network& network) {
  FeasibilityReport report;
  const int n = network.node_count();
  for (StateIndex s = 0; s < (StateIndex{1} << n); ++s) {
    ++report.states_tried;
    if (is_reachable(network, s)) {
      report.feasible = true;
      report.first_feasible_state = index_to_state(s, n);
      return report;
    }
  }
  return report;
}

Tpm sample_tpm(int nodes, RandomStream& rng, SamplingMode mode) {
  if (nodes < 1 || nodes > kMaxNodes) throw ShapeError("node count must be in [1, 10]");
  const Eigen::Index rows = Eigen::Index{1} << nodes;
  Eigen::MatrixXd m(rows, nodes);
  // Row-major draw order so the stream layout matches grid_tpm's bit layout.
  for (Eigen::Index r = 0; r < rows; ++r)
    for (int c = 0; c < nodes; ++c)
      m(r, c) = mode == SamplingMode::Binary ? (rng.coin() ? 1.0 : 0.0) : rng.uniform();
  return validate_tpm(m);
}

Tpm grid_tpm(int nodes, std::uint64_t k, std::uint64_t grid_size) {
  using boost::multiprecision::cpp_int;
  if (nodes < 1 || nodes > kMaxNodes) throw ShapeError("node count must be in [1, 10]");
  if (grid_size == 0 || k >= grid_size) throw ConfigError("grid position out of range");
  const Eigen::Index rows = Eigen::Index{1} << nodes;
  const unsigned width = static_cast<unsigned>(rows * nodes);

  cpp_int value = 0;
  if (grid_size > 1) {
    const cpp_int top = (cpp_int(1) << width) - 1;
    const cpp_int steps = grid_size - 1;
    // round(k * top / steps), halves rounded up
    value = (2 * cpp_int(k) * top + steps) / (2 * steps);
  }

  Eigen::MatrixXd m(rows, nodes);
  unsigned bit = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (int c = 0; c < nodes; ++c, ++bit) m(r, c) = boost::multiprecision::bit_test(value, bit) ? 1.0 : 0.0;
  return validate_tpm(m);
}

NodeSet permute_nodes(NodeSet set, std::span<const int> perm) {
  NodeSet out = 0;
  for (int i = 0; i < static_cast<int>(perm.size()); ++i)
    if (bits::contains(set, i)) out |= NodeSet{1} << perm[i];
  return out;
}

SystemState permute_state(const SystemState& state, std::span<const int> perm) {
  std::vector<std::uint8_t> out(state.size());
  for (int i = 0; i < state.size(); ++i) out[perm[i]] = static_cast<std::uint8_t>(state[i]);
  return SystemState(std::move(out));
}

Tpm permute_tpm(const Tpm& tpm, std::span<const int> perm) {
  const int n = tpm.node_count();
  Eigen::MatrixXd m(tpm.state_count(), n);
  for (StateIndex r = 0; r < static_cast<StateIndex>(tpm.state_count()); ++r) {
    const StateIndex target = permute_nodes(r, perm);
    for (int j = 0; j < n; ++j) m(target, perm[j]) = tpm(r, j);
  }
  return validate_tpm(m);
}

}  // namespace phiopt
