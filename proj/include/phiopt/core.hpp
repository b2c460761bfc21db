#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace phiopt {

/// Subset of node indices, bit i set <=> node i is a member.
using NodeSet = std::uint32_t;

/// Row index of a system state (node 0 is the least significant bit).
using StateIndex = std::uint32_t;

/// Upper bound on supported node counts; the bitmask types assume it.
inline constexpr int kMaxNodes = 10;

enum class Direction { Cause, Effect };

inline const char* to_string(Direction d) { return d == Direction::Cause ? "cause" : "effect"; }

namespace bits {

inline int popcount(NodeSet s) { return std::popcount(s); }

inline NodeSet full(int n) { return n >= 32 ? ~NodeSet{0} : (NodeSet{1} << n) - 1; }

inline bool contains(NodeSet s, int i) { return (s >> i) & 1u; }

inline bool is_subset(NodeSet a, NodeSet b) { return (a & ~b) == 0; }

/// Members of s in ascending order.
inline std::vector<int> members(NodeSet s) {
  std::vector<int> out;
  out.reserve(popcount(s));
  for (int i = 0; s; ++i, s >>= 1)
    if (s & 1u) out.push_back(i);
  return out;
}

inline NodeSet from_indices(const std::vector<int>& idx) {
  NodeSet s = 0;
  for (int i : idx) s |= NodeSet{1} << i;
  return s;
}

/// Scatter the low bits of `compact` onto the positions of `mask`
/// (bit k of compact goes to the k-th member of mask).
inline StateIndex deposit(StateIndex compact, NodeSet mask) {
  StateIndex out = 0;
  for (int pos = 0; mask; ++pos) {
    const int low = std::countr_zero(mask);
    if ((compact >> pos) & 1u) out |= StateIndex{1} << low;
    mask &= mask - 1;
  }
  return out;
}

/// Inverse of deposit: gather the bits of `full` at the members of mask.
inline StateIndex extract(StateIndex full, NodeSet mask) {
  StateIndex out = 0;
  for (int pos = 0; mask; ++pos) {
    const int low = std::countr_zero(mask);
    if ((full >> low) & 1u) out |= StateIndex{1} << pos;
    mask &= mask - 1;
  }
  return out;
}

/// All subsets of {0..n-1} (optionally excluding the empty set) ordered by
/// size, then lexicographically by their sorted member lists.
std::vector<NodeSet> combinations_order(int n, bool nonempty);

/// All subsets of `universe` in the same order as combinations_order.
std::vector<NodeSet> subsets_in_combinations_order(NodeSet universe, bool nonempty);

std::string to_string(NodeSet s);

}  // namespace bits

// Error hierarchy. Everything derives from Error so callers can catch once.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Matrix dimensions are not a valid 2^D x D state-by-node TPM.
struct ShapeError : Error {
  using Error::Error;
};

/// A probability lies outside [0, 1].
struct RangeError : Error {
  using Error::Error;
};

/// The mechanism's current state has zero probability under every purview state.
struct UndefinedRepertoireError : Error {
  using Error::Error;
};

/// Phi is not defined for the requested state.
struct InfeasibleStateError : Error {
  using Error::Error;
};

/// Node count exceeds the configured guardrail.
struct BudgetError : Error {
  using Error::Error;
};

struct PurviewMismatchError : Error {
  using Error::Error;
};

struct InsufficientDataError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

/// An input file could not be parsed.
struct FormatError : Error {
  using Error::Error;
};

}  // namespace phiopt
