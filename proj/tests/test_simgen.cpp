#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dynsbm/ekf.hpp"
#include "dynsbm/graph.hpp"
#include "dynsbm/simgen.hpp"

using namespace dynsbm;

TEST_CASE("generate: equal seeds match exactly, different seeds differ") {
  SimParams p;
  p.n_nodes = 48;
  p.T = 4;
  p.seed = 12345;
  const Simulation a = generate(p);
  const Simulation b = generate(p);
  p.seed = 54321;
  const Simulation c = generate(p);

  bool identical = true, differs = false;
  for (int t = 0; t < p.T; ++t) {
    identical = identical && a.snapshots[t].edges() == b.snapshots[t].edges() &&
                a.truth.psi[t] == b.truth.psi[t] &&
                a.truth.classes[t].labels() == b.truth.classes[t].labels();
    differs = differs || a.snapshots[t].edges() != c.snapshots[t].edges();
  }
  CHECK(identical);
  CHECK(differs);
}

TEST_CASE("generate: zero churn keeps memberships constant") {
  SimParams p;
  p.n_nodes = 32;
  p.churn_fraction = 0.0;
  p.T = 6;
  p.seed = 2;
  const Simulation sim = generate(p);
  for (int t = 1; t < p.T; ++t)
    CHECK(sim.truth.classes[t].labels() == sim.truth.classes[0].labels());
}

TEST_CASE("generate: theta is the logistic of psi, classes near-equal at start") {
  SimParams p;
  p.n_nodes = 130;  // remainder spread over low-index classes
  p.T = 1;
  p.seed = 3;
  const Simulation sim = generate(p);
  const auto sizes = sim.truth.classes[0].class_sizes();
  CHECK(sizes[0] == 33);
  CHECK(sizes[1] == 33);
  CHECK(sizes[2] == 32);
  CHECK(sizes[3] == 32);
  for (int i = 0; i < 16; ++i) {
    auto [a, b] = cell_of(i, 4);
    CHECK(sim.truth.theta[0](a, b) == doctest::Approx(logistic(sim.truth.psi[0][i])));
  }
}

TEST_CASE("generate: empirical block densities concentrate around theta") {
  SimParams p;
  p.seed = 6;
  p.churn_fraction = 0.0;
  p.T = 3;
  for (bool directed : {true, false}) {
    p.directed = directed;
    const Simulation sim = generate(p);
    for (int t = 0; t < p.T; ++t) {
      const BlockStats stats = block_counts(sim.snapshots[t], sim.truth.classes[t]);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          // undirected blocks are generated at the pair-symmetrized
          // probability, with half as many independent draws
          const double theta =
              directed ? sim.truth.theta[t](a, b)
                       : 0.5 * (sim.truth.theta[t](a, b) + sim.truth.theta[t](b, a));
          const double n = static_cast<double>(stats.n(a, b));
          const double trials = directed ? n : (a == b ? n / 2 : n);
          const double se = std::sqrt(theta * (1 - theta) / trials);
          CHECK(std::abs(stats.y(a, b) - theta) <= 3.0 * se + 1e-12);
        }
    }
  }
}

TEST_CASE("generate: undirected snapshots are symmetric, directed are not forced") {
  SimParams p;
  p.seed = 9;
  p.T = 1;
  p.directed = false;
  const Simulation undirected = generate(p);
  CHECK(undirected.snapshots[0].undirected());
  for (const auto& [i, j] : undirected.snapshots[0].edges())
    CHECK(undirected.snapshots[0].has_edge(j, i));
}

TEST_CASE("generate: churn rate matches the selection probability") {
  SimParams p;
  p.n_nodes = 128;
  p.T = 1001;
  p.churn_fraction = 0.10;
  p.theta_diag_mean = 0.05;  // sparse graphs keep this test fast
  p.theta_offdiag_mean = 0.02;
  p.s_diag = 0.0;
  p.s_nb = 0.0;
  p.gamma0_scale = 0.0;
  p.seed = 10;
  const Simulation sim = generate(p);

  double relabeled = 0.0;
  const int steps = p.T - 1;
  for (int t = 1; t < p.T; ++t)
    for (int i = 0; i < p.n_nodes; ++i)
      if (sim.truth.classes[t].label(i) != sim.truth.classes[t - 1].label(i)) relabeled += 1.0;
  const double mean_per_step = relabeled / steps;
  const double expected = p.churn_fraction * p.n_nodes;
  // standard error of the per-step mean over ~1000 steps
  const double se = std::sqrt(expected * (1 - p.churn_fraction)) / std::sqrt(steps);
  CHECK(std::abs(mean_per_step - expected) <= 2.0 * se);
}

TEST_CASE("generate: increment covariance converges toward the process covariance") {
  SimParams p;
  p.n_nodes = 8;  // edges are irrelevant here; keep them cheap
  p.theta_diag_mean = 0.3;
  p.theta_offdiag_mean = 0.1;
  p.churn_fraction = 0.0;
  p.seed = 11;

  const Mat gamma = build_process_cov(4, p.s_diag, p.s_nb);
  auto frob_distance = [&](int T) {
    SimParams q = p;
    q.T = T;
    const Simulation sim = generate(q);
    Mat acc = Mat::Zero(16, 16);
    for (int t = 1; t < T; ++t) {
      const Vec d = sim.truth.psi[t] - sim.truth.psi[t - 1];
      acc += d * d.transpose();
    }
    return (acc / (T - 1) - gamma).norm();
  };
  CHECK(frob_distance(3000) < frob_distance(300));
}

TEST_CASE("generate: parameter validation") {
  SimParams p;
  p.T = 0;
  CHECK_THROWS_AS(generate(p), ConfigError);
  p.T = 2;
  p.churn_fraction = 1.0;
  CHECK_THROWS_AS(generate(p), ConfigError);
  p.churn_fraction = 0.1;
  p.theta_diag_mean = 0.0;
  CHECK_THROWS_AS(generate(p), ConfigError);
  p.theta_diag_mean = 0.3;
  p.s_nb = p.s_diag;  // non-PSD neighbor coupling
  CHECK_THROWS_AS(generate(p), ConfigError);
}
