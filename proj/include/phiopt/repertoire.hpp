#pragma once

#include <Eigen/Dense>

#include "phiopt/core.hpp"
#include "phiopt/network.hpp"

namespace phiopt {

/// Distribution over the states of `purview`, indexed little-endian over the
/// purview members in ascending node order.
struct Repertoire {
  NodeSet purview = 0;
  Eigen::VectorXd probabilities = Eigen::VectorXd::Ones(1);

  Eigen::Index size() const { return probabilities.size(); }
  double operator[](Eigen::Index i) const { return probabilities[i]; }
};

bool operator==(const Repertoire& a, const Repertoire& b);

/// Past purview states given the mechanism in its current state.
/// Throws UndefinedRepertoireError when no purview state can produce it.
Repertoire cause_repertoire(const Network& network, const SystemState& state, NodeSet mechanism,
                            NodeSet purview);

/// Next purview states given the mechanism clamped to its current state.
Repertoire effect_repertoire(const Network& network, const SystemState& state, NodeSet mechanism,
                             NodeSet purview);

Repertoire repertoire(const Network& network, const SystemState& state, NodeSet mechanism,
                      NodeSet purview, Direction direction);

Repertoire unconstrained_cause_repertoire(const Network& network, NodeSet purview);
Repertoire unconstrained_effect_repertoire(const Network& network, NodeSet purview);
Repertoire unconstrained_repertoire(const Network& network, NodeSet purview, Direction direction);

/// Joint of two repertoires over disjoint purviews.
Repertoire product(const Repertoire& a, const Repertoire& b);

/// Extends `rep` to `target` with the unconstrained factors of the missing nodes.
Repertoire expand_repertoire(const Repertoire& rep, NodeSet target, const Network& network,
                             Direction direction);

/// Same, keeping the signature that names the state (unused: unconstrained
/// factors do not depend on it).
Repertoire expand_repertoire(const Repertoire& rep, NodeSet target, const Network& network,
                             const SystemState& state, Direction direction);

/// Earth mover's distance with the Hamming ground metric on purview states.
double emd(const Repertoire& p, const Repertoire& q);

/// Same on raw vectors of length 2^n.
double hamming_emd(const Eigen::Ref<const Eigen::VectorXd>& p, const Eigen::Ref<const Eigen::VectorXd>& q);

/// Sum over purview nodes of the absolute difference of their OFF marginals.
/// Equals emd(p, q) whenever p and q are both products of single-node marginals.
double marginal_distance(const Repertoire& p, const Repertoire& q);

/// Pairwise Hamming distances between the 2^n states of n binary nodes.
Eigen::MatrixXd hamming_matrix(int n);

}  // namespace phiopt
