#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "phiopt/network.hpp"
#include "support.hpp"

using namespace phiopt;

TEST_CASE("state index is little endian and bijective") {
  CHECK(state_index({1, 0, 0}) == 1);
  CHECK(state_index({0, 0, 1}) == 4);
  CHECK(state_index({1, 1, 0, 1}) == 11);
  for (int n = 1; n <= 5; ++n) {
    std::set<StateIndex> seen;
    for (StateIndex s = 0; s < (StateIndex{1} << n); ++s) {
      const SystemState st = index_to_state(s, n);
      CHECK(state_index(st) == s);
      seen.insert(state_index(st));
    }
    CHECK(seen.size() == (std::size_t{1} << n));
  }
}

TEST_CASE("state rejects values other than 0 and 1") {
  CHECK_THROWS_AS(SystemState({0, 2}), RangeError);
  CHECK_THROWS_AS(SystemState(std::vector<std::uint8_t>{1, 3}), RangeError);
}

TEST_CASE("validate_tpm checks shape and range") {
  CHECK_THROWS_AS(validate_tpm(Eigen::MatrixXd::Zero(7, 3)), ShapeError);
  CHECK_THROWS_AS(validate_tpm(Eigen::MatrixXd::Zero(8, 2)), ShapeError);
  CHECK_THROWS_AS(validate_tpm(Eigen::MatrixXd::Zero(1, 0)), ShapeError);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 2);
  m(2, 1) = 1.5;
  CHECK_THROWS_AS(validate_tpm(m), RangeError);
  m(2, 1) = std::nan("");
  CHECK_THROWS_AS(validate_tpm(m), RangeError);
  m(2, 1) = 0.25;
  const Tpm t = validate_tpm(m);
  CHECK(t.node_count() == 2);
  CHECK_FALSE(t.is_binary());
}

TEST_CASE("derived connectivity matches a brute-force dependency scan") {
  RandomStream rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 5;
    const Tpm tpm = sample_tpm(n, rng, trial % 3 == 0 ? SamplingMode::Probabilistic : SamplingMode::Binary);
    const auto cm = derive_cm(tpm);
    const auto& p = tpm.matrix();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        // Node j depends on node i iff some pair of states differing only in i
        // gives different column-j values.
        bool depends = false;
        for (Eigen::Index a = 0; a < p.rows(); ++a)
          for (Eigen::Index b = 0; b < p.rows(); ++b)
            if ((a ^ b) == (Eigen::Index{1} << i) && p(a, j) != p(b, j)) depends = true;
        CHECK(static_cast<bool>(cm(i, j)) == depends);
      }
  }
}

TEST_CASE("reachable states of a binary network are exactly its rows") {
  RandomStream rng(5);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 1 + trial % 5;
    const Network net = make_network(sample_tpm(n, rng));
    std::set<StateIndex> image;
    for (Eigen::Index r = 0; r < net.tpm.matrix().rows(); ++r) {
      StateIndex s = 0;
      for (int j = 0; j < n; ++j)
        if (net.tpm.matrix()(r, j) == 1.0) s |= StateIndex{1} << j;
      image.insert(s);
    }
    std::set<StateIndex> got;
    for (const auto& st : reachable_states(net)) got.insert(state_index(st));
    CHECK(got == image);
    const auto report = first_feasible_state(net);
    REQUIRE(report.feasible);
    CHECK(state_index(*report.first_feasible_state) == *image.begin());
    CHECK(report.states_tried == static_cast<int>(*image.begin()) + 1);
  }
}

TEST_CASE("probabilistic reachability uses the product of node probabilities") {
  Eigen::MatrixXd m(2, 1);
  m << 0.0, 0.0;
  Network net = make_network(validate_tpm(m));
  CHECK(is_reachable(net, 0));
  CHECK_FALSE(is_reachable(net, 1));
  Eigen::MatrixXd q(4, 2);
  q << 0.5, 1.0, 0.5, 1.0, 0.5, 1.0, 0.5, 1.0;
  net = make_network(validate_tpm(q));
  CHECK_FALSE(is_reachable(net, 0));
  CHECK_FALSE(is_reachable(net, 1));
  CHECK(is_reachable(net, 2));
  CHECK(is_reachable(net, 3));
}

TEST_CASE("sample_tpm is seed deterministic and mode aware") {
  RandomStream a(99), b(99);
  CHECK(sample_tpm(4, a) == sample_tpm(4, b));
  RandomStream c(3);
  const Tpm binary = sample_tpm(3, c);
  CHECK(binary.is_binary());
  const Tpm soft = sample_tpm(3, c, SamplingMode::Probabilistic);
  CHECK_FALSE(soft.is_binary());
  CHECK_THROWS_AS(sample_tpm(0, c), ShapeError);
}

TEST_CASE("grid_tpm spans the all-zero and all-one matrices") {
  const Tpm first = grid_tpm(3, 0, 5);
  CHECK((first.matrix().array() == 0.0).all());
  const Tpm last = grid_tpm(3, 4, 5);
  CHECK((last.matrix().array() == 1.0).all());
  CHECK((grid_tpm(2, 0, 1).matrix().array() == 0.0).all());
  CHECK_THROWS_AS(grid_tpm(2, 3, 3), ConfigError);
  // Two nodes: 8 bits, grid of 256 visits every integer once.
  std::set<std::vector<double>> seen;
  for (std::uint64_t k = 0; k < 256; ++k) {
    const Tpm g = grid_tpm(2, k, 256);
    const auto& m = g.matrix();
    std::vector<double> flat;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
    seen.insert(flat);
    // bit (2r + c) of k
    for (Eigen::Index r = 0; r < 4; ++r)
      for (Eigen::Index c = 0; c < 2; ++c) CHECK(m(r, c) == static_cast<double>((k >> (2 * r + c)) & 1u));
  }
  CHECK(seen.size() == 256);
}

TEST_CASE("permutation relabels rows, columns and connectivity consistently") {
  RandomStream rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 4;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.bits() % (i + 1)]);
    const Tpm tpm = sample_tpm(n, rng, SamplingMode::Probabilistic);
    const Tpm moved = permute_tpm(tpm, perm);
    const auto cm = derive_cm(tpm);
    const auto cm2 = derive_cm(moved);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) CHECK(cm(i, j) == cm2(perm[i], perm[j]));
    for (StateIndex r = 0; r < (StateIndex{1} << n); ++r)
      for (int j = 0; j < n; ++j) CHECK(moved(permute_nodes(r, perm), perm[j]) == tpm(r, j));
  }
}
