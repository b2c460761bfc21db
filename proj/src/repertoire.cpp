#include "phiopt/repertoire.hpp"

#include <bit>
#include <cmath>
#include <vector>

#include "phiopt/transport.hpp"

namespace phiopt {

namespace {

Eigen::VectorXd uniform(int members) {
  const Eigen::Index n = Eigen::Index{1} << members;
  return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
}

void check_subsets(const Network& network, NodeSet mechanism, NodeSet purview) {
  const NodeSet all = bits::full(network.node_count());
  if (!bits::is_subset(mechanism, all) || !bits::is_subset(purview, all))
    throw RangeError("node set refers to a node outside the network");
}

// Probability that node j is ON at t+1, averaged over rows matching `fixed`
// on `mask`.
double mean_on(const Network& network, int j, NodeSet mask, StateIndex fixed) {
  const auto& p = network.tpm.matrix();
  const int free = network.node_count() - bits::popcount(mask);
  const NodeSet others = bits::full(network.node_count()) & ~mask;
  double sum = 0.0;
  for (StateIndex k = 0; k < (StateIndex{1} << free); ++k) sum += p(bits::deposit(k, others) | (fixed & mask), j);
  return sum / static_cast<double>(StateIndex{1} << free);
}

template <int Cap>
double surplus_transport(const Eigen::Ref<const Eigen::VectorXd>& p, const Eigen::Ref<const Eigen::VectorXd>& q) {
  using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, Cap, 1>;
  using Idx = Eigen::Matrix<std::uint32_t, Eigen::Dynamic, 1, 0, Cap, 1>;
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, Cap, Cap>;
  const Eigen::Index size = p.size();
  Vec supply(size), demand(size);
  Idx from(size), to(size);
  Eigen::Index m = 0, n = 0;
  for (Eigen::Index i = 0; i < size; ++i) {
    const double d = p[i] - q[i];
    if (d > 0.0) {
      from[m] = static_cast<std::uint32_t>(i);
      supply[m++] = d;
    } else if (d < 0.0) {
      to[n] = static_cast<std::uint32_t>(i);
      demand[n++] = -d;
    }
  }
  if (m == 0 || n == 0) return 0.0;
  Mat cost(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = std::popcount(from[i] ^ to[j]);
  return transport_cost(supply.head(m), demand.head(n), cost);
}

}  // namespace

bool operator==(const Repertoire& a, const Repertoire& b) {
  return a.purview == b.purview && a.probabilities.size() == b.probabilities.size() &&
         a.probabilities == b.probabilities;
}

Repertoire unconstrained_cause_repertoire(const Network& network, NodeSet purview) {
  check_subsets(network, 0, purview);
  return {purview, uniform(bits::popcount(purview))};
}

Repertoire unconstrained_effect_repertoire(const Network& network, NodeSet purview) {
  return effect_repertoire(network, SystemState(std::vector<std::uint8_t>(network.node_count())), 0, purview);
}

Repertoire unconstrained_repertoire(const Network& network, NodeSet purview, Direction direction) {
  return direction == Direction::Cause ? unconstrained_cause_repertoire(network, purview)
                                       : unconstrained_effect_repertoire(network, purview);
}

Repertoire cause_repertoire(const Network& network, const SystemState& state, NodeSet mechanism,
                            NodeSet purview) {
  check_subsets(network, mechanism, purview);
  if (purview == 0) return {};
  if (mechanism == 0) return unconstrained_cause_repertoire(network, purview);

  const int n = network.node_count();
  const auto& p = network.tpm.matrix();
  const int width = bits::popcount(purview);
  const double scale = 1.0 / static_cast<double>(StateIndex{1} << (n - width));

  Eigen::VectorXd joint = Eigen::VectorXd::Ones(Eigen::Index{1} << width);
  Eigen::VectorXd factor(joint.size());
  for (int m : bits::members(mechanism)) {
    factor.setZero();
    const bool on = state[m] != 0;
    for (StateIndex r = 0; r < static_cast<StateIndex>(p.rows()); ++r)
      factor[bits::extract(r, purview)] += on ? p(r, m) : 1.0 - p(r, m);
    joint.array() *= (factor * scale).array();
  }
  const double total = joint.sum();
  if (!(total > 0.0))
    throw UndefinedRepertoireError("mechanism " + bits::to_string(mechanism) +
                                   " has zero probability for every past state of purview " +
                                   bits::to_string(purview));
  return {purview, joint / total};
}

Repertoire effect_repertoire(const Network& network, const SystemState& state, NodeSet mechanism,
                             NodeSet purview) {
  check_subsets(network, mechanism, purview);
  const StateIndex current = state.size() == network.node_count() ? state_index(state) : 0;
  Eigen::VectorXd joint = Eigen::VectorXd::Ones(1);
  for (int j : bits::members(purview)) {
    const double q = mean_on(network, j, mechanism, current);
    Eigen::VectorXd next(joint.size() * 2);
    next.head(joint.size()) = joint * (1.0 - q);
    next.tail(joint.size()) = joint * q;
    joint.swap(next);
  }
  return {purview, joint};
}

Repertoire repertoire(const Network& network, const SystemState& state, NodeSet mechanism,
                      NodeSet purview, Direction direction) {
  return direction == Direction::Cause ? cause_repertoire(network, state, mechanism, purview)
                                       : effect_repertoire(network, state, mechanism, purview);
}

Repertoire product(const Repertoire& a, const Repertoire& b) {
  if (a.purview & b.purview) throw PurviewMismatchError("product needs disjoint purviews");
  const NodeSet joint = a.purview | b.purview;
  Eigen::VectorXd out(Eigen::Index{1} << bits::popcount(joint));
  for (StateIndex t = 0; t < static_cast<StateIndex>(out.size()); ++t) {
    const StateIndex full = bits::deposit(t, joint);
    out[t] = a[bits::extract(full, a.purview)] * b[bits::extract(full, b.purview)];
  }
  return {joint, out};
}

Repertoire expand_repertoire(const Repertoire& rep, NodeSet target, const Network& network,
                             Direction direction) {
  if (!bits::is_subset(rep.purview, target))
    throw PurviewMismatchError("expansion target must contain the purview");
  Repertoire out = product(rep, unconstrained_repertoire(network, target & ~rep.purview, direction));
  const double total = out.probabilities.sum();
  if (total > 0.0) out.probabilities /= total;
  return out;
}

Repertoire expand_repertoire(const Repertoire& rep, NodeSet target, const Network& network,
                             const SystemState&, Direction direction) {
  return expand_repertoire(rep, target, network, direction);
}

Eigen::MatrixXd hamming_matrix(int n) {
  const Eigen::Index size = Eigen::Index{1} << n;
  Eigen::MatrixXd h(size, size);
  for (Eigen::Index i = 0; i < size; ++i)
    for (Eigen::Index j = 0; j < size; ++j)
      h(i, j) = std::popcount(static_cast<std::uint32_t>(i ^ j));
  return h;
}

double hamming_emd(const Eigen::Ref<const Eigen::VectorXd>& p, const Eigen::Ref<const Eigen::VectorXd>& q) {
  const Eigen::Index size = p.size();
  if (q.size() != size || size == 0 || !std::has_single_bit(static_cast<std::uint64_t>(size)))
    throw PurviewMismatchError("distributions must share a purview");
  if (size == 1) return 0.0;
  if (size == 2) return std::abs(p[0] - q[0]);

  // Mass present in both stays put at zero cost; only the surplus moves.
  if (size <= 64) return surplus_transport<64>(p, q);
  return surplus_transport<Eigen::Dynamic>(p, q);
}

double emd(const Repertoire& p, const Repertoire& q) {
  if (p.purview != q.purview)
    throw PurviewMismatchError("emd: purviews " + bits::to_string(p.purview) + " and " +
                               bits::to_string(q.purview) + " differ");
  return hamming_emd(p.probabilities, q.probabilities);
}

double marginal_distance(const Repertoire& p, const Repertoire& q) {
  if (p.purview != q.purview) throw PurviewMismatchError("marginal_distance: purviews differ");
  const int width = bits::popcount(p.purview);
  double total = 0.0;
  for (int k = 0; k < width; ++k) {
    double off_p = 0.0, off_q = 0.0;
    for (Eigen::Index s = 0; s < p.size(); ++s)
      if (!((s >> k) & 1)) {
        off_p += p[s];
        off_q += q[s];
      }
    total += std::abs(off_p - off_q);
  }
  return total;
}

}  // namespace phiopt
