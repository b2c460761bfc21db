#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <string>
#include <vector>

#include "phiopt/network.hpp"
#include "phiopt/random.hpp"

#ifndef PHIOPT_TEST_DATA
#define PHIOPT_TEST_DATA "tests/data"
#endif

namespace testing {

inline nlohmann::json load_golden() {
  std::ifstream in(std::string(PHIOPT_TEST_DATA) + "/golden_phi.json");
  return nlohmann::json::parse(in);
}

inline phiopt::Tpm tpm_from_json(const nlohmann::json& rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
  return phiopt::validate_tpm(m);
}

inline phiopt::SystemState state_from_json(const nlohmann::json& bits) {
  std::vector<std::uint8_t> v;
  for (const auto& b : bits) v.push_back(static_cast<std::uint8_t>(b.get<int>()));
  return phiopt::SystemState(v);
}

inline phiopt::NodeSet set_from_json(const nlohmann::json& nodes) {
  phiopt::NodeSet s = 0;
  for (const auto& i : nodes) s |= phiopt::NodeSet{1} << i.get<int>();
  return s;
}

/// Random point of the probability simplex; some entries forced to zero.
inline Eigen::VectorXd random_distribution(Eigen::Index size, phiopt::RandomStream& rng, double zero_rate = 0.2) {
  Eigen::VectorXd p(size);
  for (Eigen::Index i = 0; i < size; ++i) p[i] = rng.uniform() < zero_rate ? 0.0 : -std::log(1.0 - rng.uniform());
  if (p.sum() == 0.0) p[0] = 1.0;
  return p / p.sum();
}

/// Minimizes c.x subject to A x = b, x >= 0, with b >= 0. Dense two-phase
/// tableau simplex using Bland's rule. Returns NaN when infeasible.
inline double simplex_min(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  const Eigen::Index rows = A.rows();
  const Eigen::Index vars = A.cols();
  const Eigen::Index width = vars + rows + 1;  // originals, artificials, rhs
  const double eps = 1e-12;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(rows + 1, width);
  t.topLeftCorner(rows, vars) = A;
  t.block(0, vars, rows, rows).setIdentity();
  t.col(width - 1).head(rows) = b;
  std::vector<Eigen::Index> basis(rows);
  for (Eigen::Index i = 0; i < rows; ++i) basis[i] = vars + i;

  const auto pivot = [&](Eigen::Index r, Eigen::Index col) {
    t.row(r) /= t(r, col);
    for (Eigen::Index i = 0; i <= rows; ++i)
      if (i != r && t(i, col) != 0.0) t.row(i) -= t(i, col) * t.row(r);
    basis[r] = col;
  };
  const auto run = [&](Eigen::Index allowed) {
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j)
        if (t(rows, j) < -eps) {
          enter = j;
          break;
        }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rows; ++i)
        if (t(i, enter) > eps) {
          const double ratio = t(i, width - 1) / t(i, enter);
          if (leave < 0 || ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
            best = ratio;
            leave = i;
          }
        }
      if (leave < 0) return false;  // unbounded
      pivot(leave, enter);
    }
  };

  // Phase 1: minimize the sum of artificials.
  for (Eigen::Index j = 0; j < vars; ++j) t(rows, j) = -t.col(j).head(rows).sum();
  t(rows, width - 1) = -b.sum();
  run(vars);
  if (-t(rows, width - 1) > 1e-9) return std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index i = 0; i < rows; ++i)
    if (basis[i] >= vars)
      for (Eigen::Index j = 0; j < vars; ++j)
        if (std::abs(t(i, j)) > 1e-9) {
          pivot(i, j);
          break;
        }

  // Phase 2 on the original costs.
  t.row(rows).setZero();
  t.row(rows).head(vars) = c.transpose();
  for (Eigen::Index i = 0; i < rows; ++i)
    if (basis[i] < vars) t.row(rows) -= c[basis[i]] * t.row(i);
  run(vars);
  double value = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i)
    if (basis[i] < vars) value += c[basis[i]] * t(i, width - 1);
  return value;
}

/// Earth mover's distance between two distributions over n-bit states with
/// the Hamming ground metric, as a transportation LP.
inline double lp_emd(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  const Eigen::Index k = p.size();
  // Row sums for every source and column sums for every sink but the last.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * k - 1, k * k);
  Eigen::VectorXd b(2 * k - 1), c(k * k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      const Eigen::Index v = i * k + j;
      A(i, v) = 1.0;
      if (j < k - 1) A(k + j, v) = 1.0;
      c[v] = std::popcount(static_cast<unsigned>(i ^ j));
    }
  b.head(k) = p;
  b.tail(k - 1) = q.head(k - 1);
  return simplex_min(A, b, c);
}

}  // namespace testing
