#pragma once

#include <optional>
#include <vector>

#include "phiopt/mechanism.hpp"
#include "phiopt/network.hpp"
#include "phiopt/repertoire.hpp"

namespace phiopt {

/// Node-count guardrail for whole-system Phi.
inline constexpr int kDefaultMaxNodes = 6;

/// Concepts of one network in one state. Keeps its network because concept
/// distances expand repertoires with that network's unconstrained factors.
struct Constellation {
  Network network;
  std::vector<Concept> concepts;
  Repertoire null_cause;
  Repertoire null_effect;

  int node_count() const { return network.node_count(); }
  std::size_t size() const { return concepts.size(); }
  bool empty() const { return concepts.empty(); }
};

/// Connections from `severed_from` into `severed_to` are replaced by noise.
struct SystemCut {
  NodeSet severed_from = 0;
  NodeSet severed_to = 0;

  bool splits(NodeSet mechanism) const { return (mechanism & severed_from) && (mechanism & severed_to); }
  friend bool operator==(const SystemCut&, const SystemCut&) = default;
};

struct PhiResult {
  double big_phi = 0.0;
  SystemState state;
  SystemCut mip_cut;
  Constellation constellation;
  Constellation partitioned_constellation;
  // Some core cause or effect, intact or under an evaluated cut, was chosen
  // among equally good purviews; relabeling nodes may then change big_phi.
  bool tie_broken = false;
};

struct PhiOptions {
  int max_nodes = kDefaultMaxNodes;
};

/// Throws InfeasibleStateError when `state` is unreachable.
Constellation build_constellation(const Network& network, const SystemState& state);

std::vector<SystemCut> enumerate_cuts(int nodes);

Network apply_cut(const Network& network, const SystemCut& cut);

/// `cm` with the connections severed by `cut` removed.
ConnectivityMatrix cut_connectivity(const ConnectivityMatrix& cm, const SystemCut& cut);

/// Distance between two concepts in concept space (unrounded).
double concept_distance(const Concept& a, const Network& net_a, const Concept& b, const Network& net_b);

/// Distance from a concept to its network's null concept.
double null_concept_distance(const Concept& c, const Network& network);

double constellation_distance(const Constellation& c1, const Constellation& c2);

/// constellation_distance quantized to kPhiDecimals places.
double rounded_constellation_distance(const Constellation& c1, const Constellation& c2);

PhiResult big_phi(const Network& network, const SystemState& state, const PhiOptions& options = {});

struct PhiEvaluation {
  double phi = 0.0;
  SystemState state;
};

/// Phi at the first feasible state, absent when there is none.
std::optional<PhiEvaluation> phi_of_tpm(const Tpm& tpm, const PhiOptions& options = {});

bool strongly_connected(const ConnectivityMatrix& cm);

}  // namespace phiopt
