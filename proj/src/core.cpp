#include "phiopt/core.hpp"

#include <algorithm>
#include <sstream>

namespace phiopt::bits {

std::vector<NodeSet> subsets_in_combinations_order(NodeSet universe, bool nonempty) {
  const auto nodes = members(universe);
  const int n = static_cast<int>(nodes.size());
  std::vector<NodeSet> out;
  out.reserve(std::size_t{1} << n);
  if (!nonempty) out.push_back(0);
  // For each size r, walk index combinations i_0 < ... < i_{r-1} lexicographically.
  for (int r = 1; r <= n; ++r) {
    std::vector<int> idx(r);
    for (int i = 0; i < r; ++i) idx[i] = i;
    while (true) {
      NodeSet s = 0;
      for (int i : idx) s |= NodeSet{1} << nodes[i];
      out.push_back(s);
      int pos = r - 1;
      while (pos >= 0 && idx[pos] == n - r + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int i = pos + 1; i < r; ++i) idx[i] = idx[i - 1] + 1;
    }
  }
  return out;
}

std::vector<NodeSet> combinations_order(int n, bool nonempty) {
  return subsets_in_combinations_order(full(n), nonempty);
}

std::string to_string(NodeSet s) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (int i : members(s)) {
    if (!first) out << ',';
    out << i;
    first = false;
  }
  out << '}';
  return out.str();
}

}  // namespace phiopt::bits
