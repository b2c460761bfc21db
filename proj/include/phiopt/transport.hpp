#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace phiopt {

/// Exact minimum-cost transportation value.
///
/// Moves `supply` (length m) onto `demand` (length n) with unit costs
/// `cost` (m x n, nonnegative). Totals are assumed equal up to rounding; any
/// residue below a relative 1e-13 is left unshipped. Solved by successive
/// shortest augmenting paths with Johnson potentials over the dense
/// bipartite residual graph, so the value is optimal up to floating-point
/// rounding and independent of input ordering beyond that.
template <typename SupplyDerived, typename DemandDerived, typename CostDerived>
typename SupplyDerived::Scalar transport_cost(const Eigen::MatrixBase<SupplyDerived>& supply,
                                              const Eigen::MatrixBase<DemandDerived>& demand,
                                              const Eigen::MatrixBase<CostDerived>& cost) {
  using Scalar = typename SupplyDerived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  const Eigen::Index m = supply.size();
  const Eigen::Index n = demand.size();
  eigen_assert(cost.rows() == m && cost.cols() == n);
  if (m == 0 || n == 0) return Scalar(0);

  // One block of scratch: remaining supply, remaining demand, flow, potentials, distances.
  const Eigen::Index v = m + n;
  std::vector<Scalar> scratch(static_cast<std::size_t>(m + n + m * n + 2 * v), Scalar(0));
  Eigen::Map<Vector> left(scratch.data(), m);
  Eigen::Map<Vector> right(scratch.data() + m, n);
  Eigen::Map<Matrix> flow(scratch.data() + m + n, m, n);
  Scalar* potential = scratch.data() + m + n + m * n;
  Scalar* dist = potential + v;
  left = supply;
  right = demand;
  const Scalar total = std::max(left.sum(), right.sum());
  if (!(total > Scalar(0))) return Scalar(0);
  const Scalar tol = total * Scalar(1e-13);

  // Nodes 0..m-1 are sources, m..m+n-1 are sinks.
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  std::vector<Eigen::Index> parent(v);
  std::vector<char> done(v);

  auto remaining = [&](const Eigen::Map<Vector>& x) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (x[i] > tol) return true;
    return false;
  };

  while (remaining(left) && remaining(right)) {
    std::fill(dist, dist + v, inf);
    std::fill(parent.begin(), parent.end(), Eigen::Index{-1});
    std::fill(done.begin(), done.end(), 0);
    for (Eigen::Index i = 0; i < m; ++i)
      if (left[i] > tol) dist[i] = Scalar(0);

    Eigen::Index target = -1;
    for (Eigen::Index step = 0; step < v; ++step) {
      Eigen::Index u = -1;
      for (Eigen::Index w = 0; w < v; ++w)
        if (!done[w] && dist[w] < inf && (u < 0 || dist[w] < dist[u])) u = w;
      if (u < 0) break;
      done[u] = 1;
      if (u >= m && right[u - m] > tol) {
        target = u;
        break;
      }
      if (u < m) {
        for (Eigen::Index j = 0; j < n; ++j) {
          const Eigen::Index w = m + j;
          if (done[w]) continue;
          const Scalar reduced = cost(u, j) + potential[u] - potential[w];
          const Scalar nd = dist[u] + std::max(reduced, Scalar(0));
          if (nd < dist[w]) {
            dist[w] = nd;
            parent[w] = u;
          }
        }
      } else {
        const Eigen::Index j = u - m;
        for (Eigen::Index i = 0; i < m; ++i) {
          if (done[i] || !(flow(i, j) > Scalar(0))) continue;
          const Scalar reduced = -cost(i, j) + potential[u] - potential[i];
          const Scalar nd = dist[u] + std::max(reduced, Scalar(0));
          if (nd < dist[i]) {
            dist[i] = nd;
            parent[i] = u;
          }
        }
      }
    }
    if (target < 0) break;

    const Scalar reach = dist[target];
    for (Eigen::Index w = 0; w < v; ++w) potential[w] += std::min(dist[w], reach);

    // Bottleneck along the path back to its source.
    Scalar amount = right[target - m];
    Eigen::Index w = target;
    while (parent[w] >= 0) {
      const Eigen::Index p = parent[w];
      if (p >= m) amount = std::min(amount, flow(w, p - m));  // backward edge sink p -> source w
      w = p;
    }
    amount = std::min(amount, left[w]);

    w = target;
    while (parent[w] >= 0) {
      const Eigen::Index p = parent[w];
      if (p < m)
        flow(p, w - m) += amount;
      else
        flow(w, p - m) -= amount;
      w = p;
    }
    left[w] -= amount;
    right[target - m] -= amount;
  }

  Scalar value(0);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (flow(i, j) > Scalar(0)) value += flow(i, j) * cost(i, j);
  return value;
}

}  // namespace phiopt
