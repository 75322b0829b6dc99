#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dynsbm/ekf.hpp"
#include "dynsbm/linkpred.hpp"

using namespace dynsbm;

namespace {

Snapshot snap_with(int t, int n, std::vector<Edge> edges) { return Snapshot(t, n, std::move(edges)); }

ScoreMatrix constant_scores(int n, double v) {
  ScoreMatrix s(n);
  s.values.setConstant(v);
  s.values.diagonal().setZero();
  return s;
}

}  // namespace

TEST_CASE("ewma_predict: degenerate decays") {
  const std::vector<Snapshot> history{snap_with(1, 3, {{0, 1}}), snap_with(2, 3, {{1, 2}})};
  SUBCASE("lambda = 0 returns the last snapshot") {
    const ScoreMatrix s = ewma_predict(history, 0.0);
    CHECK(s.values(1, 2) == doctest::Approx(1.0));
    CHECK(s.values(0, 1) == doctest::Approx(0.0));
  }
  SUBCASE("lambda = 1 freezes the first snapshot") {
    const ScoreMatrix s = ewma_predict(history, 1.0);
    CHECK(s.values(0, 1) == doctest::Approx(1.0));
    CHECK(s.values(1, 2) == doctest::Approx(0.0));
  }
}

TEST_CASE("ewma_predict: two-step hand recursion") {
  // edge (0,1) present at t=1, absent at t=2, lambda = 1/2 -> score 1/2
  const std::vector<Snapshot> history{snap_with(1, 2, {{0, 1}}), snap_with(2, 2, {})};
  CHECK(ewma_predict(history, 0.5).values(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("ewma_predict: union node set zero-pads absent nodes") {
  const std::vector<Snapshot> history{snap_with(1, 2, {{0, 1}}), snap_with(2, 4, {{2, 3}})};
  const ScoreMatrix s = ewma_predict(history, 0.5);
  CHECK(s.n_nodes() == 4);
  CHECK(s.values(0, 1) == doctest::Approx(0.5));
  CHECK(s.values(2, 3) == doctest::Approx(0.5));
  CHECK(s.values(3, 2) == doctest::Approx(0.0));
}

TEST_CASE("block_predict: table lookup and within-class invariance") {
  FilterState state;
  Mat theta(2, 2);
  theta << 0.9, 0.1, 0.1, 0.9;
  state.mean = logit_vec(stack_columns(theta));
  state.cov = Mat::Identity(4, 4);

  SUBCASE("k = 1 gives one shared score") {
    FilterState one;
    one.mean = logit_vec(Vec::Constant(1, 0.3));
    one.cov = Mat::Identity(1, 1);
    const ScoreMatrix s = block_predict(one, ClassAssignment({0, 0, 0}, 1));
    CHECK(s.values(0, 1) == doctest::Approx(0.3));
    CHECK(s.values(2, 1) == doctest::Approx(0.3));
  }
  SUBCASE("worked 3-node example") {
    const ScoreMatrix s = block_predict(state, ClassAssignment({0, 0, 1}, 2));
    CHECK(s.values(0, 1) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(s.values(0, 2) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(s.values(2, 0) == doctest::Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("scores invariant under within-class permutation") {
    const ScoreMatrix s = block_predict(state, ClassAssignment({0, 0, 1, 1}, 2));
    CHECK(s.values(0, 2) == doctest::Approx(s.values(1, 3)));
    CHECK(s.values(0, 1) == doctest::Approx(s.values(1, 0)));
  }
}

TEST_CASE("blend: convex combination and bounds") {
  const ScoreMatrix block = constant_scores(3, 0.9);
  const ScoreMatrix ewma = constant_scores(3, 0.1);
  CHECK(blend(block, ewma, 0.0).values(0, 1) == doctest::Approx(0.1));
  CHECK(blend(block, ewma, 1.0).values(0, 1) == doctest::Approx(0.9));
  CHECK(blend(block, ewma, 0.5).values(0, 1) == doctest::Approx(0.5));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    ScoreMatrix a(4), b(4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != j) {
          a.values(i, j) = unif(rng);
          b.values(i, j) = unif(rng);
        }
    const ScoreMatrix c = blend(a, b, unif(rng));
    CHECK(c.values.minCoeff() >= 0.0);
    CHECK(c.values.maxCoeff() <= 1.0);
  }
}

TEST_CASE("auc: worked examples") {
  SUBCASE("indicator scores are perfect") {
    Snapshot truth(1, 4, {{0, 1}, {2, 3}, {3, 0}});
    ScoreMatrix s(4);
    for (const auto& [i, j] : truth.edges()) s.values(i, j) = 1.0;
    CHECK(auc(s, truth) == doctest::Approx(1.0));
  }
  SUBCASE("constant scores are chance level") {
    Snapshot truth(1, 4, {{0, 1}, {2, 3}});
    CHECK(auc(constant_scores(4, 0.7), truth) == doctest::Approx(0.5));
  }
  SUBCASE("single-class truth is undefined") {
    Snapshot no_edges(1, 3, {});
    CHECK_THROWS_AS(auc(constant_scores(3, 0.5), no_edges), ConfigError);
  }
}

TEST_CASE("auc: three-score worked example") {
  // pairs a=0.9, b=0.4, c=0.6; filler pairs are scored so they never
  // change the outcome of the enumerated comparisons
  Snapshot truth_ac(1, 3, {{0, 1}, {1, 2}});  // a and c are edges
  ScoreMatrix s(3);
  s.values.setConstant(-1.0);  // fillers lose against everything
  s.values.diagonal().setZero();
  s.values(0, 1) = 0.9;  // a
  s.values(1, 0) = 0.4;  // b
  s.values(1, 2) = 0.6;  // c
  // a beats b, c beats b (and every filler): perfect separation
  CHECK(auc(s, truth_ac) == doctest::Approx(1.0));

  ScoreMatrix s2(3);
  s2.values.setConstant(2.0);  // fillers now beat everything
  s2.values.diagonal().setZero();
  s2.values(0, 1) = 0.9;
  s2.values(1, 0) = 0.4;
  s2.values(1, 2) = 0.6;
  Snapshot truth_b(1, 3, {{1, 0}});  // only b is an edge
  // b loses against a, c and every filler
  CHECK(auc(s2, truth_b) == doctest::Approx(0.0));
}

TEST_CASE("auc: invariant under strictly monotone transforms") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Snapshot truth(1, 8, {{0, 1}, {1, 2}, {3, 4}, {5, 6}, {6, 7}, {2, 0}});
  ScoreMatrix s(8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      if (i != j) s.values(i, j) = unif(rng);
  const double base = auc(s, truth);

  ScoreMatrix t(8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      if (i != j) t.values(i, j) = 1.0 / (1.0 + std::exp(-(3.0 * s.values(i, j) - 1.0)));
  CHECK(auc(t, truth) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("auc: rank statistic equals exhaustive counting, with ties") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> level(0, 4);  // coarse scores force ties
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 7;
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && unif(rng) < 0.3) edges.emplace_back(i, j);
    if (edges.empty() || edges.size() == static_cast<std::size_t>(n * (n - 1))) continue;
    Snapshot truth(1, n, edges);
    ScoreMatrix s(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) s.values(i, j) = 0.25 * level(rng);

    // exhaustive oracle
    double wins = 0.0;
    std::int64_t pos = 0, neg = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        if (!truth.has_edge(i, j)) continue;
        ++pos;
        for (int u = 0; u < n; ++u)
          for (int v = 0; v < n; ++v) {
            if (u == v || truth.has_edge(u, v)) continue;
            if (s.values(i, j) > s.values(u, v))
              wins += 1.0;
            else if (s.values(i, j) == s.values(u, v))
              wins += 0.5;
          }
      }
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v)
        if (u != v && !truth.has_edge(u, v)) ++neg;
    const double oracle = wins / (static_cast<double>(pos) * static_cast<double>(neg));
    CHECK(auc(s, truth) == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("auc_micro: pools pairs across steps") {
  Snapshot t1(1, 2, {{0, 1}});
  Snapshot t2(2, 2, {{1, 0}});
  ScoreMatrix s1(2), s2(2);
  s1.values(0, 1) = 0.8;  // edge at t1
  s1.values(1, 0) = 0.3;
  s2.values(0, 1) = 0.1;
  s2.values(1, 0) = 0.6;  // edge at t2
  // pooled positives {0.8, 0.6}, negatives {0.3, 0.1}: perfect
  CHECK(auc_micro({s1, s2}, {t1, t2}) == doctest::Approx(1.0));
}
