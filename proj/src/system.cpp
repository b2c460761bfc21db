#include "phiopt/system.hpp"

#include <limits>
#include <string>

#include "phiopt/transport.hpp"

namespace phiopt {

namespace {

Constellation empty_constellation(const Network& network) {
  const NodeSet all = bits::full(network.node_count());
  return {network, {}, unconstrained_cause_repertoire(network, all), unconstrained_effect_repertoire(network, all)};
}

bool has_tie(const Constellation& c) {
  for (const auto& concept_ : c.concepts)
    if (concept_.cause.tied || concept_.effect.tied) return true;
  return false;
}

bool damaged_by(const Mice& mice, const SystemCut& cut) {
  if (cut.splits(mice.mechanism)) return true;
  const NodeSet source = mice.direction == Direction::Cause ? mice.purview : mice.mechanism;
  const NodeSet target = mice.direction == Direction::Cause ? mice.mechanism : mice.purview;
  return (source & cut.severed_from) && (target & cut.severed_to);
}

// Identical for transport purposes: same phi, mechanism and repertoires.
bool same_point(const Concept& a, const Concept& b) {
  return a.phi == b.phi && a.mechanism == b.mechanism && a.cause.repertoire == b.cause.repertoire &&
         a.effect.repertoire == b.effect.repertoire;
}

std::vector<const Concept*> unique_to(const Constellation& mine, const Constellation& theirs) {
  std::vector<const Concept*> out;
  for (const auto& c : mine.concepts) {
    bool shared = false;
    for (const auto& d : theirs.concepts)
      if (same_point(c, d)) {
        shared = true;
        break;
      }
    if (!shared) out.push_back(&c);
  }
  return out;
}

Repertoire null_mice_repertoire() { return Repertoire{}; }

}  // namespace

bool strongly_connected(const ConnectivityMatrix& cm) {
  const int n = static_cast<int>(cm.rows());
  if (n <= 1) return true;
  const auto reach = [&](bool forward) {
    NodeSet seen = 1, frontier = 1;
    while (frontier) {
      NodeSet next = 0;
      for (int i : bits::members(frontier))
        for (int j = 0; j < n; ++j)
          if ((forward ? cm(i, j) : cm(j, i)) && !bits::contains(seen, j)) next |= NodeSet{1} << j;
      seen |= next;
      frontier = next;
    }
    return seen;
  };
  return reach(true) == bits::full(n) && reach(false) == bits::full(n);
}

Constellation build_constellation(const Network& network, const SystemState& state) {
  if (state.size() != network.node_count()) throw ShapeError("state length does not match the network");
  if (!is_reachable(network, state_index(state)))
    throw InfeasibleStateError("state is not reachable from any state of the network");
  MechanismAnalyzer analyzer(network, state);
  Constellation out = empty_constellation(network);
  for (NodeSet m : bits::combinations_order(network.node_count(), true))
    if (auto c = analyzer.build_concept(m)) out.concepts.push_back(std::move(*c));
  return out;
}

std::vector<SystemCut> enumerate_cuts(int nodes) {
  std::vector<SystemCut> cuts;
  if (nodes < 2) return cuts;
  const NodeSet all = bits::full(nodes);
  for (NodeSet from = 1; from < all; ++from) cuts.push_back({from, all & ~from});
  return cuts;
}

Network apply_cut(const Network& network, const SystemCut& cut) {
  const int n = network.node_count();
  const auto& p = network.tpm.matrix();
  Eigen::MatrixXd q = p;
  const int width = bits::popcount(cut.severed_from);
  const double scale = 1.0 / static_cast<double>(StateIndex{1} << width);
  for (StateIndex r = 0; r < static_cast<StateIndex>(p.rows()); ++r) {
    const StateIndex rest = r & ~cut.severed_from;
    for (int j : bits::members(cut.severed_to & bits::full(n))) {
      double sum = 0.0;
      for (StateIndex x = 0; x < (StateIndex{1} << width); ++x) sum += p(rest | bits::deposit(x, cut.severed_from), j);
      q(r, j) = sum * scale;
    }
  }
  return make_network(validate_tpm(q));
}

ConnectivityMatrix cut_connectivity(const ConnectivityMatrix& cm, const SystemCut& cut) {
  ConnectivityMatrix out = cm;
  for (int i : bits::members(cut.severed_from))
    for (int j : bits::members(cut.severed_to)) out(i, j) = 0;
  return out;
}

double concept_distance(const Concept& a, const Network& net_a, const Concept& b, const Network& net_b) {
  const NodeSet cause = a.cause.purview | b.cause.purview;
  const NodeSet effect = a.effect.purview | b.effect.purview;
  const double dc = emd(expand_repertoire(a.cause.repertoire, cause, net_a, Direction::Cause),
                        expand_repertoire(b.cause.repertoire, cause, net_b, Direction::Cause));
  const double de = emd(expand_repertoire(a.effect.repertoire, effect, net_a, Direction::Effect),
                        expand_repertoire(b.effect.repertoire, effect, net_b, Direction::Effect));
  return dc + de;
}

double null_concept_distance(const Concept& c, const Network& network) {
  Concept null;
  null.cause.repertoire = null_mice_repertoire();
  null.effect.repertoire = null_mice_repertoire();
  return concept_distance(c, network, null, network);
}

namespace {

struct Distance {
  double value = 0.0;
  Rounding rounding = Rounding::Decimal;
};

// `null1`, when given, holds null_concept_distance for each concept of c1.
Distance distance_between(const Constellation& c1, const Constellation& c2,
                          const std::vector<double>* null1 = nullptr) {
  const auto null_of = [&](const Concept* c, const Constellation& owner) {
    if (null1 && &owner == &c1) return (*null1)[static_cast<std::size_t>(c - c1.concepts.data())];
    return null_concept_distance(*c, owner.network);
  };
  if (c1.node_count() != c2.node_count())
    throw ShapeError("constellations cover " + std::to_string(c1.node_count()) + " and " +
                     std::to_string(c2.node_count()) + " nodes");
  const auto only1 = unique_to(c1, c2);
  const auto only2 = unique_to(c2, c1);

  if (only1.empty() || only2.empty()) {
    // Only disappearances: every lost concept travels to the null concept.
    const bool swap = c2.size() > c1.size();
    const auto& lost = swap ? only2 : only1;
    const Constellation& owner = swap ? c2 : c1;
    Distance d;
    for (const Concept* c : lost) {
      d.value += c->phi * null_of(c, owner);
      if (c->rounding == Rounding::Scaled) d.rounding = Rounding::Scaled;
    }
    return d;
  }

  const auto m = static_cast<Eigen::Index>(only1.size());
  const auto n = static_cast<Eigen::Index>(only2.size());
  double s1 = 0.0, s2 = 0.0;
  Eigen::VectorXd supply(m + 1), demand(n + 1);
  for (Eigen::Index i = 0; i < m; ++i) s1 += (supply[i] = only1[i]->phi);
  for (Eigen::Index j = 0; j < n; ++j) s2 += (demand[j] = only2[j]->phi);
  supply[m] = std::max(0.0, s2 - s1);
  demand[n] = std::max(0.0, s1 - s2);

  Eigen::MatrixXd cost(m + 1, n + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = concept_distance(*only1[i], c1.network, *only2[j], c2.network);
    cost(i, n) = null_of(only1[i], c1);
  }
  for (Eigen::Index j = 0; j < n; ++j) cost(m, j) = null_of(only2[j], c2);
  cost(m, n) = 0.0;
  return {transport_cost(supply, demand, cost), Rounding::Decimal};
}

}  // namespace

double constellation_distance(const Constellation& c1, const Constellation& c2) {
  return distance_between(c1, c2).value;
}

double rounded_constellation_distance(const Constellation& c1, const Constellation& c2) {
  const Distance d = distance_between(c1, c2);
  return round_phi(d.value, d.rounding);
}

PhiResult big_phi(const Network& network, const SystemState& state, const PhiOptions& options) {
  const int n = network.node_count();
  if (n > options.max_nodes)
    throw BudgetError("network has " + std::to_string(n) + " nodes, the limit is " +
                      std::to_string(options.max_nodes));
  if (state.size() != n) throw ShapeError("state length does not match the network");
  if (!is_reachable(network, state_index(state)))
    throw InfeasibleStateError("state is not reachable from any state of the network");

  PhiResult result;
  result.state = state;
  result.constellation = empty_constellation(network);
  result.partitioned_constellation = result.constellation;
  const auto cuts = enumerate_cuts(n);
  if (!cuts.empty()) result.mip_cut = cuts.front();
  if (n == 1 || !strongly_connected(network.cm)) return result;

  MechanismAnalyzer intact(network, state);
  std::vector<bool> is_concept(std::size_t{1} << n, false);
  for (NodeSet m : bits::combinations_order(n, true))
    if (auto c = intact.build_concept(m)) {
      is_concept[m] = true;
      result.constellation.concepts.push_back(std::move(*c));
    }
  result.partitioned_constellation = result.constellation;
  if (result.constellation.empty()) return result;
  result.tie_broken = has_tie(result.constellation);

  std::vector<double> null_distances;
  for (const auto& c : result.constellation.concepts) null_distances.push_back(null_concept_distance(c, network));

  std::vector<Mice> reusable;
  for (const auto& mice : intact.computed_mice())
    if (mice.phi > 0.0) reusable.push_back(mice);

  double best = std::numeric_limits<double>::infinity();
  for (const auto& cut : cuts) {
    const Network severed = apply_cut(network, cut);
    MechanismAnalyzer analyzer(severed, state);
    analyzer.set_purview_filters({network.cm, cut_connectivity(network.cm, cut)});
    for (const auto& mice : reusable)
      if (!damaged_by(mice, cut)) analyzer.seed_mice(mice);

    Constellation partitioned = empty_constellation(severed);
    for (NodeSet m : bits::combinations_order(n, true))
      if (is_concept[m] || cut.splits(m))
        if (auto c = analyzer.build_concept(m)) partitioned.concepts.push_back(std::move(*c));

    result.tie_broken = result.tie_broken || has_tie(partitioned);
    const Distance d = distance_between(result.constellation, partitioned, &null_distances);
    const double phi = round_phi(d.value, d.rounding);
    if (phi < best) {
      best = phi;
      result.big_phi = phi;
      result.mip_cut = cut;
      result.partitioned_constellation = std::move(partitioned);
    }
    if (phi == 0.0) break;
  }
  return result;
}

std::optional<PhiEvaluation> phi_of_tpm(const Tpm& tpm, const PhiOptions& options) {
  if (tpm.node_count() > options.max_nodes)
    throw BudgetError("network has " + std::to_string(tpm.node_count()) + " nodes, the limit is " +
                      std::to_string(options.max_nodes));
  const Network network = make_network(tpm);
  const FeasibilityReport report = first_feasible_state(network);
  if (!report.feasible) return std::nullopt;
  return PhiEvaluation{big_phi(network, *report.first_feasible_state, options).big_phi,
                       *report.first_feasible_state};
}

}  // namespace phiopt
