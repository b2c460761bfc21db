#include "phiopt/mechanism.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace phiopt {

double round_phi(double value, Rounding mode) {
  if (!std::isfinite(value)) return value;
  if (mode == Rounding::Scaled) {
    const double out = std::nearbyint(value * 1e6) / 1e6;
    return out == 0.0 ? 0.0 : out;
  }
  char buf[400];
  const auto written = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, kPhiDecimals);
  double out = value;
  std::from_chars(buf, written.ptr, out);
  return out == 0.0 ? 0.0 : out;  // drop negative zero
}

std::vector<MechanismPartition> enumerate_partitions(NodeSet mechanism, NodeSet purview) {
  std::vector<MechanismPartition> out;
  if (mechanism == 0 || purview == 0) return out;
  // Walk subsets of each mask in ascending numeric order.
  const auto subsets = [](NodeSet mask) {
    std::vector<NodeSet> s;
    NodeSet sub = 0;
    do {
      s.push_back(sub);
      sub = (sub - mask) & mask;
    } while (sub != 0);
    return s;
  };
  for (NodeSet m1 : subsets(mechanism))
    for (NodeSet p1 : subsets(purview)) {
      const NodeSet m2 = mechanism & ~m1;
      const NodeSet p2 = purview & ~p1;
      if ((m1 == 0 && p1 == 0) || (m2 == 0 && p2 == 0)) continue;
      out.push_back({m1, p1, m2, p2});
    }
  return out;
}

namespace {

// Local bitmask over the rows / columns of the submatrix cm[from, to].
bool block_submatrix(const std::vector<NodeSet>& out_edges, const std::vector<NodeSet>& in_edges,
                     int cols) {
  const int rows = static_cast<int>(out_edges.size());
  int best = 0;
  bool all_single = true;
  for (int r = 0; r < rows; ++r) {
    const int deg = bits::popcount(out_edges[r]);
    if (deg == 0) return true;
    if (deg != 1) all_single = false;
    if (deg > bits::popcount(out_edges[best])) best = r;
  }
  if (all_single) return true;

  const NodeSet every_output = bits::full(cols);
  const auto outputs_of = [&](NodeSet sources) {
    NodeSet s = 0;
    for (int r = 0; r < rows; ++r)
      if (bits::contains(sources, r)) s |= out_edges[r];
    return s;
  };
  const auto inputs_to = [&](NodeSet sinks) {
    NodeSet s = 0;
    for (int c = 0; c < cols; ++c)
      if (bits::contains(sinks, c)) s |= in_edges[c];
    return s;
  };

  NodeSet sources = NodeSet{1} << best;
  NodeSet sinks = outputs_of(sources);
  NodeSet sink_inputs = inputs_to(sinks);
  while (true) {
    if (sink_inputs == sources) return true;
    sources = sink_inputs;
    sinks = outputs_of(sources);
    sink_inputs = inputs_to(sinks);
    if (sinks == every_output) return false;
  }
}

}  // namespace

bool block_reducible(const ConnectivityMatrix& cm, NodeSet from, NodeSet to) {
  if (from == 0 || to == 0) return true;
  const auto rows = bits::members(from);
  const auto cols = bits::members(to);
  std::vector<NodeSet> out_edges(rows.size(), 0), in_edges(cols.size(), 0);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      if (cm(rows[r], cols[c])) {
        out_edges[r] |= NodeSet{1} << c;
        in_edges[c] |= NodeSet{1} << r;
      }
  for (NodeSet e : out_edges)
    if (e == 0) return true;
  for (NodeSet e : in_edges)
    if (e == 0) return true;
  if (rows.size() > 1 && cols.size() > 1)
    return block_submatrix(out_edges, in_edges, static_cast<int>(cols.size()));
  return false;
}

MechanismAnalyzer::MechanismAnalyzer(const Network& network, const SystemState& state)
    : network_(&network), state_(state) {
  if (state.size() != network.node_count())
    throw ShapeError("state has " + std::to_string(state.size()) + " entries, network has " +
                     std::to_string(network.node_count()) + " nodes");
  filters_.push_back(network.cm);
}

void MechanismAnalyzer::set_purview_filters(std::vector<ConnectivityMatrix> cms) { filters_ = std::move(cms); }

void MechanismAnalyzer::seed_mice(const Mice& mice) {
  seeded_[static_cast<std::uint64_t>(mice.mechanism) << 1 | (mice.direction == Direction::Effect)] = mice;
}

const Repertoire& MechanismAnalyzer::repertoire(Direction direction, NodeSet mechanism, NodeSet purview) {
  const std::uint64_t key = (static_cast<std::uint64_t>(mechanism) << 33) |
                            (static_cast<std::uint64_t>(purview) << 1) | (direction == Direction::Effect);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  Repertoire rep = phiopt::repertoire(*network_, state_, mechanism, purview, direction);
  return cache_.emplace(key, std::move(rep)).first->second;
}

Repertoire MechanismAnalyzer::partitioned_repertoire(Direction direction, const MechanismPartition& partition) {
  return product(repertoire(direction, partition.mechanism1, partition.purview1),
                 repertoire(direction, partition.mechanism2, partition.purview2));
}

Mip MechanismAnalyzer::find_mip(Direction direction, NodeSet mechanism, NodeSet purview) {
  Mip best;
  if (purview == 0) return best;
  const Repertoire& whole = repertoire(direction, mechanism, purview);
  best.repertoire = whole;
  best.phi = std::numeric_limits<double>::infinity();
  const auto key = [](NodeSet m, NodeSet p) { return (static_cast<std::uint64_t>(m) << 32) | p; };
  for (const auto& partition : enumerate_partitions(mechanism, purview)) {
    // Its mirror image came earlier with the same product.
    if (key(partition.mechanism1, partition.purview1) > key(partition.mechanism2, partition.purview2)) continue;
    Repertoire cut = partitioned_repertoire(direction, partition);
    double raw;
    if (direction == Direction::Effect) {
      raw = marginal_distance(whole, cut);
    } else {
      // The marginal distance never exceeds the transport value.
      if (marginal_distance(whole, cut) > best.phi + 1e-6) continue;
      raw = emd(whole, cut);
    }
    const double phi = round_phi(raw, direction == Direction::Cause ? Rounding::Decimal : Rounding::Scaled);
    if (phi == 0.0 || phi < best.phi) {
      best.partition = partition;
      best.phi = phi;
      best.partitioned = std::move(cut);
      if (phi == 0.0) break;
    }
  }
  if (!std::isfinite(best.phi)) best.phi = 0.0;
  return best;
}

std::vector<NodeSet> MechanismAnalyzer::candidate_purviews(Direction direction, NodeSet mechanism) const {
  std::vector<NodeSet> out;
  for (NodeSet purview : bits::combinations_order(network_->node_count(), true)) {
    bool keep = true;
    for (const auto& cm : filters_) {
      const bool reducible = direction == Direction::Cause ? block_reducible(cm, purview, mechanism)
                                                           : block_reducible(cm, mechanism, purview);
      if (reducible) {
        keep = false;
        break;
      }
    }
    if (keep) out.push_back(purview);
  }
  return out;
}

Mice MechanismAnalyzer::core_mice(Direction direction, NodeSet mechanism) {
  const auto seeded = seeded_.find(static_cast<std::uint64_t>(mechanism) << 1 | (direction == Direction::Effect));
  if (seeded != seeded_.end()) return seeded->second;

  Mice best;
  best.direction = direction;
  best.mechanism = mechanism;
  best.rounding = direction == Direction::Cause ? Rounding::Decimal : Rounding::Scaled;
  bool found = false;
  for (NodeSet purview : candidate_purviews(direction, mechanism)) {
    Mip mip = find_mip(direction, mechanism, purview);
    const bool better = !found || mip.phi > best.phi ||
                        (mip.phi == best.phi && bits::popcount(purview) > bits::popcount(best.purview));
    if (better) {
      best.purview = purview;
      best.repertoire = std::move(mip.repertoire);
      best.phi = mip.phi;
      best.mip = mip.partition;
      best.tied = false;
      found = true;
    } else if (mip.phi == best.phi && mip.phi > 0.0 && bits::popcount(purview) == bits::popcount(best.purview)) {
      best.tied = true;
    }
  }
  computed_.push_back(best);
  return best;
}

std::optional<Concept> MechanismAnalyzer::build_concept(NodeSet mechanism) {
  if (mechanism == 0) return std::nullopt;
  Concept c;
  c.mechanism = mechanism;
  try {
    c.cause = core_mice(Direction::Cause, mechanism);
  } catch (const UndefinedRepertoireError&) {
    return std::nullopt;
  }
  c.effect = core_mice(Direction::Effect, mechanism);
  c.phi = std::min(c.cause.phi, c.effect.phi);
  c.rounding = c.effect.phi < c.cause.phi ? c.effect.rounding : c.cause.rounding;
  if (!(c.phi > 0.0)) return std::nullopt;
  return c;
}

Repertoire partitioned_repertoire(const Network& network, const SystemState& state,
                                  const MechanismPartition& partition, Direction direction) {
  return MechanismAnalyzer(network, state).partitioned_repertoire(direction, partition);
}

Mip find_mip(const Network& network, const SystemState& state, NodeSet mechanism, NodeSet purview,
             Direction direction) {
  return MechanismAnalyzer(network, state).find_mip(direction, mechanism, purview);
}

Mice core_mice(const Network& network, const SystemState& state, NodeSet mechanism, Direction direction) {
  return MechanismAnalyzer(network, state).core_mice(direction, mechanism);
}

std::optional<Concept> build_concept(const Network& network, const SystemState& state, NodeSet mechanism) {
  return MechanismAnalyzer(network, state).build_concept(mechanism);
}

}  // namespace phiopt
