#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "dynsbm/graph.hpp"
#include "dynsbm/simgen.hpp"

using namespace dynsbm;

namespace {

Snapshot three_node_snapshot() {
  // edges {(0,1),(1,0),(2,0)}; classes a={0,1}, b={2}
  return Snapshot(1, 3, {{0, 1}, {1, 0}, {2, 0}});
}

}  // namespace

TEST_CASE("block_counts: empty edge set") {
  Snapshot snap(1, 4, {});
  ClassAssignment assignment({0, 0, 1, 1}, 2);
  const BlockStats stats = block_counts(snap, assignment);
  CHECK(stats.m.isZero());
  CHECK(stats.n(0, 0) == 2);
  CHECK(stats.n(0, 1) == 4);
  CHECK(stats.n(1, 0) == 4);
  CHECK(stats.n(1, 1) == 2);
}

TEST_CASE("block_counts: four equal classes of 32") {
  std::vector<int> labels(128);
  for (int i = 0; i < 128; ++i) labels[i] = i / 32;
  Snapshot snap(1, 128, {});
  const BlockStats stats = block_counts(snap, ClassAssignment(labels, 4));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) CHECK(stats.n(a, b) == (a == b ? 992 : 1024));
}

TEST_CASE("block_counts: singleton class is degenerate") {
  // classes {0,1} and {2}: the second diagonal block has no possible
  // edges, so the counts are rejected rather than divided by zero
  CHECK_THROWS_AS(block_counts(three_node_snapshot(), ClassAssignment({0, 0, 1}, 2)), ConfigError);
}

TEST_CASE("block_counts: worked example without the degenerate block") {
  // same edge pattern, second class padded to two members
  Snapshot snap(1, 4, {{0, 1}, {1, 0}, {2, 0}});
  const BlockStats stats = block_counts(snap, ClassAssignment({0, 0, 1, 1}, 2));
  CHECK(stats.m(0, 0) == 2);
  CHECK(stats.m(0, 1) == 0);
  CHECK(stats.m(1, 0) == 1);
  CHECK(stats.m(1, 1) == 0);
  CHECK(stats.n(0, 0) == 2);
  CHECK(stats.n(0, 1) == 4);
  CHECK(stats.n(1, 0) == 4);
  CHECK(stats.n(1, 1) == 2);
  CHECK(stats.y(0, 0) == doctest::Approx(1.0));
  CHECK(stats.y(1, 0) == doctest::Approx(0.25));
}

TEST_CASE("block_counts: errors") {
  Snapshot snap(1, 3, {{0, 1}});
  CHECK_THROWS_AS(ClassAssignment({0, 0, 2}, 2), ConfigError);  // label out of range
  CHECK_THROWS_AS(ClassAssignment({0, 0, 0}, 2), ConfigError);  // empty class
  // singleton class: diagonal block has no possible edges
  CHECK_THROWS_AS(block_counts(snap, ClassAssignment({0, 0, 1}, 2)), ConfigError);
  // mismatched length
  CHECK_THROWS_AS(block_counts(snap, ClassAssignment({0, 1}, 2)), ConfigError);
}

TEST_CASE("block_counts: 3-node example via stats vectors") {
  // the singleton-free variant used across kalman tests
  Snapshot snap(1, 4, {{0, 1}, {1, 0}, {2, 0}});
  const BlockStats stats = block_counts(snap, ClassAssignment({0, 0, 1, 1}, 2));
  CHECK(stats.m(0, 0) == 2);
  CHECK(stats.m(1, 0) == 1);
  CHECK(stats.y(0, 0) == doctest::Approx(1.0));
  CHECK(stats.y(1, 0) == doctest::Approx(0.25));
  // column stacking: index (a,b) -> b*k + a
  const Vec m = stats.m_vec();
  CHECK(m[0] == 2);  // (0,0)
  CHECK(m[1] == 1);  // (1,0)
  CHECK(m[2] == 0);  // (0,1)
  CHECK(m[3] == 0);  // (1,1)
}

TEST_CASE("snapshot: self-edges and range are rejected") {
  CHECK_THROWS_AS(Snapshot(1, 3, {{1, 1}}), ConfigError);
  CHECK_THROWS_AS(Snapshot(1, 3, {{0, 3}}), ConfigError);
  CHECK_THROWS_AS(Snapshot(1, 3, {{0, 1}}, /*undirected=*/true), ConfigError);
  CHECK_NOTHROW(Snapshot(1, 3, {{0, 1}, {1, 0}}, /*undirected=*/true));
}

TEST_CASE("clamp_density: worked examples") {
  CHECK(clamp_density(0.5, 100) == doctest::Approx(0.5));
  CHECK(clamp_density(0.0, 100) == doctest::Approx(0.005));
  CHECK(clamp_density(1.0, 4) == doctest::Approx(0.875));
}

TEST_CASE("block_counts invariants: edge total and undirected symmetry") {
  SimParams p;
  p.n_nodes = 48;
  p.k = 3;
  p.T = 1;
  p.churn_fraction = 0.0;
  p.seed = 99;

  for (bool directed : {true, false}) {
    p.directed = directed;
    const Simulation sim = generate(p);
    const BlockStats stats = block_counts(sim.snapshots[0], sim.truth.classes[0]);
    CHECK(stats.m.sum() == sim.snapshots[0].n_edges());
    if (!directed) CHECK(stats.m == stats.m.transpose().eval());
  }
}

TEST_CASE("block_counts: invariant under relabeling nodes within a class") {
  SimParams p;
  p.n_nodes = 30;
  p.k = 3;
  p.T = 1;
  p.directed = true;
  p.churn_fraction = 0.0;
  p.seed = 5;
  const Simulation sim = generate(p);
  const auto& snap = sim.snapshots[0];
  const auto labels = sim.truth.classes[0].labels();

  // swap two nodes of the same class and remap the edges accordingly
  int u = -1, v = -1;
  for (int i = 0; i < 30 && u < 0; ++i)
    for (int j = i + 1; j < 30; ++j)
      if (labels[i] == labels[j]) {
        u = i;
        v = j;
        break;
      }
  REQUIRE(u >= 0);
  auto remap = [&](int x) { return x == u ? v : x == v ? u : x; };
  std::vector<Edge> edges;
  for (const auto& [i, j] : snap.edges()) edges.emplace_back(remap(i), remap(j));
  Snapshot permuted(1, 30, edges);

  const BlockStats a = block_counts(snap, sim.truth.classes[0]);
  const BlockStats b = block_counts(permuted, sim.truth.classes[0]);
  CHECK(a.m == b.m);
  CHECK(a.n == b.n);
}

TEST_CASE("MutableBlockCounts: incremental equals from-scratch under random moves") {
  SimParams p;
  p.n_nodes = 40;
  p.k = 4;
  p.T = 1;
  p.directed = true;
  p.churn_fraction = 0.0;
  p.seed = 31;
  const Simulation sim = generate(p);
  std::vector<int> labels = sim.truth.classes[0].labels();

  MutableBlockCounts counts(sim.snapshots[0], labels, 4);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> node(0, 39), cls(0, 3);

  Vec m_inc, n_inc;
  for (int step = 0; step < 200; ++step) {
    const int i = node(rng), to = cls(rng);
    std::vector<std::int64_t> sizes(4, 0);
    for (int c : labels) ++sizes[c];
    if (labels[i] != to && sizes[labels[i]] <= 2) continue;

    // tentative counts must match a fresh computation
    counts.moved_counts(i, to, m_inc, n_inc);
    std::vector<int> moved = labels;
    moved[i] = to;
    MutableBlockCounts fresh(sim.snapshots[0], moved, 4);
    Vec m_ref, n_ref;
    fresh.counts(m_ref, n_ref);
    CHECK(m_inc == m_ref);
    CHECK(n_inc == n_ref);

    counts.apply_move(i, to);
    labels = moved;
    Vec m_cur, n_cur;
    counts.counts(m_cur, n_cur);
    CHECK(m_cur == m_ref);
  }
}

TEST_CASE("MutableBlockCounts: unplaced nodes and greedy placement counts") {
  Snapshot snap(1, 5, {{0, 1}, {1, 0}, {3, 4}, {4, 3}, {0, 4}});
  std::vector<int> labels = {0, 0, 1, 1, MutableBlockCounts::kUnplaced};
  MutableBlockCounts counts(snap, labels, 2);
  CHECK(counts.sizes()[0] == 2);
  CHECK(counts.sizes()[1] == 2);
  // edges among placed nodes only: (0,1),(1,0) in block (0,0); (3,4),(4,3),(0,4) skipped
  CHECK(counts.m()(0, 0) == 2);
  CHECK(counts.m()(1, 1) == 0);

  Vec m_vec, n_vec;
  counts.placed_counts(4, 1, m_vec, n_vec);
  MutableBlockCounts placed(snap, {0, 0, 1, 1, 1}, 2);
  Vec m_ref, n_ref;
  placed.counts(m_ref, n_ref);
  CHECK(m_vec == m_ref);
  CHECK(n_vec == n_ref);

  counts.add_node(4, 1);
  counts.counts(m_vec, n_vec);
  CHECK(m_vec == m_ref);
  CHECK(n_vec == n_ref);
}
