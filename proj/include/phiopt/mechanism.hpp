#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "phiopt/core.hpp"
#include "phiopt/network.hpp"
#include "phiopt/repertoire.hpp"

namespace phiopt {

/// Decimal places kept for every small-phi and big-Phi value.
inline constexpr int kPhiDecimals = 6;

/// How a distance is quantized to kPhiDecimals places.
///   Decimal: correctly rounded decimal conversion, ties to even.
///   Scaled:  nearest integer (ties to even) of value * 10^6, divided back.
/// The two differ only on values within an ulp of a half-unit tie.
enum class Rounding { Decimal, Scaled };

double round_phi(double value, Rounding mode = Rounding::Decimal);

struct MechanismPartition {
  NodeSet mechanism1 = 0;
  NodeSet purview1 = 0;
  NodeSet mechanism2 = 0;
  NodeSet purview2 = 0;

  friend bool operator==(const MechanismPartition&, const MechanismPartition&) = default;
};

struct Mip {
  MechanismPartition partition;
  double phi = 0.0;
  Repertoire repertoire;
  Repertoire partitioned;
};

/// Maximally irreducible cause or effect of a mechanism.
struct Mice {
  Direction direction = Direction::Cause;
  NodeSet mechanism = 0;
  NodeSet purview = 0;
  Repertoire repertoire;
  double phi = 0.0;
  MechanismPartition mip;
  Rounding rounding = Rounding::Decimal;
  // Another purview of the same size reached the same phi with a different
  // repertoire; the choice then depends on node labels.
  bool tied = false;
};

struct Concept {
  NodeSet mechanism = 0;
  Mice cause;
  Mice effect;
  double phi = 0.0;
  Rounding rounding = Rounding::Decimal;  // of whichever side gave phi
};

/// Memoizes repertoires of one network in one state. Not thread-safe; use one
/// per thread.
class MechanismAnalyzer {
 public:
  MechanismAnalyzer(const Network& network, const SystemState& state);

  const Network& network() const { return *network_; }
  const SystemState& state() const { return state_; }

  /// Purviews reducible under any of `cms` are skipped. Defaults to the
  /// network's own matrix.
  void set_purview_filters(std::vector<ConnectivityMatrix> cms);

  /// core_mice returns `mice` for its mechanism and direction without
  /// recomputing.
  void seed_mice(const Mice& mice);

  const Repertoire& repertoire(Direction direction, NodeSet mechanism, NodeSet purview);
  Repertoire partitioned_repertoire(Direction direction, const MechanismPartition& partition);
  Mip find_mip(Direction direction, NodeSet mechanism, NodeSet purview);

  /// Purviews worth scanning, in combinations order.
  std::vector<NodeSet> candidate_purviews(Direction direction, NodeSet mechanism) const;

  Mice core_mice(Direction direction, NodeSet mechanism);
  std::optional<Concept> build_concept(NodeSet mechanism);

  /// Every Mice produced by core_mice so far (seeded ones excluded).
  const std::vector<Mice>& computed_mice() const { return computed_; }

 private:
  const Network* network_;
  SystemState state_;
  std::vector<ConnectivityMatrix> filters_;
  std::unordered_map<std::uint64_t, Repertoire> cache_;
  std::unordered_map<std::uint64_t, Mice> seeded_;
  std::vector<Mice> computed_;
};

/// Ordered bipartitions of (mechanism, purview), ascending by (M1, P1) bitmask,
/// without the uncut pairing.
std::vector<MechanismPartition> enumerate_partitions(NodeSet mechanism, NodeSet purview);

Repertoire partitioned_repertoire(const Network& network, const SystemState& state,
                                  const MechanismPartition& partition, Direction direction);

Mip find_mip(const Network& network, const SystemState& state, NodeSet mechanism, NodeSet purview,
             Direction direction);

Mice core_mice(const Network& network, const SystemState& state, NodeSet mechanism, Direction direction);

std::optional<Concept> build_concept(const Network& network, const SystemState& state, NodeSet mechanism);

/// True when the edges from `from` into `to` cannot bind the two sets into one
/// irreducible block.
bool block_reducible(const ConnectivityMatrix& cm, NodeSet from, NodeSet to);

}  // namespace phiopt
