#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dynsbm/aposteriori.hpp"
#include "dynsbm/evalmetrics.hpp"
#include "dynsbm/pipeline.hpp"
#include "dynsbm/simgen.hpp"
#include "dynsbm/ssbm.hpp"

using namespace dynsbm;

namespace {

Vec scalar_vec(double x) {
  Vec v(1);
  v[0] = x;
  return v;
}

BlockStats scalar_stats(std::int64_t m, std::int64_t n) {
  BlockStats s;
  s.m = CountMat::Constant(1, 1, m);
  s.n = CountMat::Constant(1, 1, n);
  s.y = Mat::Constant(1, 1, static_cast<double>(m) / static_cast<double>(n));
  return s;
}

}  // namespace

TEST_CASE("log_posterior: zero quadratic at the prior mean") {
  const BlockStats stats = scalar_stats(3, 4);
  const Vec psi = scalar_vec(0.4);
  const PosteriorScore score = log_posterior(stats, psi, psi, Mat::Constant(1, 1, 2.0));
  CHECK(score.prior_term == doctest::Approx(0.0));
  CHECK(score.value() == doctest::Approx(score.data_term));
}

TEST_CASE("log_posterior: scalar worked example") {
  const BlockStats stats = scalar_stats(3, 4);
  const PosteriorScore score =
      log_posterior(stats, scalar_vec(0.0), scalar_vec(1.0), Mat::Constant(1, 1, 2.0));
  CHECK(score.data_term == doctest::Approx(4.0 * std::log(0.5)).epsilon(1e-12));
  CHECK(score.prior_term == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(score.value() == doctest::Approx(-3.0226).epsilon(1e-4));
}

TEST_CASE("log_posterior: flat prior reduces to the blockmodel likelihood") {
  SimParams p;
  p.n_nodes = 32;
  p.k = 2;
  p.T = 1;
  p.directed = true;
  p.churn_fraction = 0.0;
  p.seed = 21;
  const Simulation sim = generate(p);
  const BlockStats stats = block_counts(sim.snapshots[0], sim.truth.classes[0]);

  const Vec psi = logit_vec(stats.clamped_density_vec());
  const Mat flat = 1e12 * Mat::Identity(4, 4);
  const PosteriorScore score = log_posterior(stats, psi, Vec::Zero(4), flat);
  const double loglik =
      ssbm_loglikelihood(stats, EdgeProbMatrix{unstack_columns(logistic_vec(psi), 2)});
  CHECK(score.value() ==
        doctest::Approx(loglik).epsilon(1e-6));
  CHECK(std::abs(score.prior_term) < 1e-6 * std::abs(score.data_term));
}

TEST_CASE("fit_step: local maximum returns the assignment unchanged") {
  SimParams p;
  p.n_nodes = 40;
  p.k = 2;
  p.T = 2;
  p.theta_diag_mean = 0.7;
  p.theta_offdiag_mean = 0.05;
  p.directed = true;
  p.churn_fraction = 0.0;
  p.seed = 33;
  const Simulation sim = generate(p);
  const StateSpaceConfig cfg = StateSpaceConfig::random_walk(2, p.s_diag, p.s_nb);

  const FilterState init = diffuse_init(block_counts(sim.snapshots[0], sim.truth.classes[0]));
  SearchConfig search;
  search.max_iter = 100;
  const FitStepResult step =
      fit_step(sim.snapshots[1], sim.truth.classes[0], init, cfg, search);
  CHECK(step.assignment.labels() == sim.truth.classes[1].labels());
  CHECK(step.iterations == 0);
  CHECK(step.state.t == 2);
  CHECK(step.state.phase == Phase::Updated);
}

TEST_CASE("fit_step: relabels exactly the planted wrong node") {
  // 8 nodes, strong diagonal; node 3 carried over with the wrong class
  std::vector<Edge> edges;
  auto clique = [&](std::initializer_list<int> nodes) {
    for (int i : nodes)
      for (int j : nodes)
        if (i != j) edges.emplace_back(i, j);
  };
  clique({0, 1, 2, 3});
  clique({4, 5, 6, 7});
  Snapshot snap(2, 8, edges);

  FilterState prev;
  prev.mean = Vec::Zero(4);
  const double strong = logit(0.9), weak = logit(0.05);
  prev.mean[0] = strong;   // (0,0)
  prev.mean[3] = strong;   // (1,1)
  prev.mean[1] = weak;
  prev.mean[2] = weak;
  prev.cov = 0.01 * Mat::Identity(4, 4);
  prev.t = 1;
  prev.phase = Phase::Updated;

  const ClassAssignment wrong({0, 0, 0, 1, 1, 1, 1, 0}, 2);  // nodes 3 and 7 misplaced
  const StateSpaceConfig cfg = StateSpaceConfig::random_walk(2, 0.01, 0.0);
  SearchConfig search;
  search.max_iter = 50;
  const FitStepResult step = fit_step(snap, wrong, prev, cfg, search);
  CHECK(step.iterations == 2);
  CHECK(step.assignment.labels() == std::vector<int>{0, 0, 0, 0, 1, 1, 1, 1});
}

TEST_CASE("fit_step: never scores below the carried assignment") {
  SimParams p;
  p.directed = true;
  p.seed = 51;
  p.T = 4;
  const Simulation sim = generate(p);
  const StateSpaceConfig cfg = StateSpaceConfig::random_walk(p.k, p.s_diag, p.s_nb);
  SearchConfig search;
  search.max_iter = 400;

  // scramble a tenth of the carried labels to force search work
  std::vector<int> labels = sim.truth.classes[0].labels();
  for (int i = 0; i < p.n_nodes; i += 10) labels[i] = (labels[i] + 1) % p.k;

  FilterState state = diffuse_init(block_counts(sim.snapshots[0], sim.truth.classes[0]));
  ClassAssignment assignment(labels, p.k);
  for (int t = 1; t < p.T; ++t) {
    const FitStepResult step = fit_step(sim.snapshots[t], assignment, state, cfg, search);
    // the local search cannot do worse than the carried assignment
    const FilterState pred = predict(state, cfg);
    const BlockStats carried = block_counts(
        sim.snapshots[t], ClassAssignment(assignment.labels(), p.k));
    const Vec y = carried.clamped_density_vec();
    const FilterState upd = update(pred, y, plugin_obs_cov(pred.mean, carried.n));
    const PosteriorScore carried_score =
        log_posterior(carried, upd.mean, pred.mean, pred.cov);
    CHECK(step.score.value() >= carried_score.value() - 1e-9);
    state = step.state;
    assignment = step.assignment;
  }
}

TEST_CASE("fit_step: parallel neighbor evaluation matches serial") {
  SimParams p;
  p.directed = true;
  p.seed = 61;
  p.T = 2;
  const Simulation sim = generate(p);
  const StateSpaceConfig cfg = StateSpaceConfig::random_walk(p.k, p.s_diag, p.s_nb);
  const FilterState init = diffuse_init(block_counts(sim.snapshots[0], sim.truth.classes[0]));

  std::vector<int> labels = sim.truth.classes[0].labels();
  for (int i = 0; i < p.n_nodes; i += 7) labels[i] = (labels[i] + 1) % p.k;
  const ClassAssignment start(labels, p.k);

  SearchConfig serial;
  serial.max_iter = 400;
  SearchConfig parallel = serial;
  parallel.parallel = true;
  parallel.n_threads = 4;

  const FitStepResult a = fit_step(sim.snapshots[1], start, init, cfg, serial);
  const FitStepResult b = fit_step(sim.snapshots[1], start, init, cfg, parallel);
  CHECK(a.assignment.labels() == b.assignment.labels());
  CHECK(a.score.value() == doctest::Approx(b.score.value()).epsilon(1e-12));
}

TEST_CASE("fit_step: ties break toward the lowest node, then class") {
  // nodes 0 and 1 are structurally interchangeable and both misplaced:
  // their repair moves score identically, so the lower id moves first
  std::vector<Edge> edges;
  auto clique = [&](std::initializer_list<int> nodes) {
    for (int i : nodes)
      for (int j : nodes)
        if (i != j) edges.emplace_back(i, j);
  };
  clique({0, 1, 2, 3});
  clique({4, 5, 6, 7});
  Snapshot snap(2, 8, edges);

  FilterState prev;
  prev.mean = Vec::Zero(4);
  prev.mean[0] = logit(0.9);
  prev.mean[3] = logit(0.9);
  prev.mean[1] = logit(0.05);
  prev.mean[2] = logit(0.05);
  prev.cov = 0.01 * Mat::Identity(4, 4);
  prev.t = 1;
  prev.phase = Phase::Updated;

  const ClassAssignment start({1, 1, 0, 0, 1, 1, 1, 1}, 2);
  const StateSpaceConfig cfg = StateSpaceConfig::random_walk(2, 0.01, 0.0);
  SearchConfig one_move;
  one_move.max_iter = 1;
  const FitStepResult step = fit_step(snap, start, prev, cfg, one_move);
  CHECK(step.iterations == 1);
  CHECK(step.assignment.label(0) == 0);  // node 0 repaired first
  CHECK(step.assignment.label(1) == 1);  // node 1 waits for the next sweep
}

TEST_CASE("fit_step: node churn between snapshots") {
  SimParams p;
  p.n_nodes = 30;
  p.k = 3;
  p.T = 1;
  p.theta_diag_mean = 0.6;
  p.theta_offdiag_mean = 0.05;
  p.directed = true;
  p.churn_fraction = 0.0;
  p.seed = 71;
  const Simulation sim = generate(p);
  const FilterState init = diffuse_init(block_counts(sim.snapshots[0], sim.truth.classes[0]));
  const StateSpaceConfig cfg = StateSpaceConfig::random_walk(3, 0.01, 0.0025);
  SearchConfig search;
  search.max_iter = 100;

  SUBCASE("new nodes are placed greedily") {
    // grow the snapshot by two nodes wired into class 2's clique pattern
    std::vector<Edge> edges = sim.snapshots[0].edges();
    for (int i = 0; i < 30; ++i) {
      if (sim.truth.classes[0].label(i) == 2) {
        edges.emplace_back(i, 30);
        edges.emplace_back(30, i);
        edges.emplace_back(i, 31);
        edges.emplace_back(31, i);
      }
    }
    Snapshot grown(2, 32, edges);
    const FitStepResult step = fit_step(grown, sim.truth.classes[0], init, cfg, search);
    CHECK(step.assignment.n_nodes() == 32);
    CHECK(step.assignment.label(30) == 2);
    CHECK(step.assignment.label(31) == 2);
  }
  SUBCASE("departed nodes are dropped from the assignment") {
    std::vector<Edge> shrunk_edges;
    for (const auto& [i, j] : sim.snapshots[0].edges())
      if (i < 27 && j < 27) shrunk_edges.emplace_back(i, j);
    Snapshot shrunk(2, 27, shrunk_edges);
    const FitStepResult step = fit_step(shrunk, sim.truth.classes[0], init, cfg, search);
    CHECK(step.assignment.n_nodes() == 27);
  }
}

TEST_CASE("fit_initial: flat-prior search scores at least the spectral start") {
  SimParams p;
  p.directed = true;
  p.T = 1;
  p.churn_fraction = 0.0;
  p.seed = 81;
  const Simulation sim = generate(p);
  SearchConfig search;
  search.max_iter = 400;
  const FitStepResult fitted = fit_initial(sim.snapshots[0], p.k, search, 7);

  const ClassAssignment spectral = spectral_init(sim.snapshots[0], p.k, 7);
  const BlockStats stats = block_counts(sim.snapshots[0], spectral);
  const double spectral_score =
      blockmodel_data_term(stats.m_vec(), stats.n_vec(), logit_vec(stats.clamped_density_vec()));
  CHECK(fitted.score.value() >= spectral_score - 1e-9);
  CHECK(fitted.score.prior_term == doctest::Approx(0.0));
  CHECK(fitted.state.t == 1);
}

TEST_CASE("prior factorization is reused across a sweep (shared scores match)") {
  // indirectly verified by scoring consistency: the returned score equals
  // a fresh log_posterior at the returned state and assignment
  SimParams p;
  p.directed = true;
  p.T = 2;
  p.seed = 91;
  const Simulation sim = generate(p);
  const StateSpaceConfig cfg = StateSpaceConfig::random_walk(p.k, p.s_diag, p.s_nb);
  const FilterState init = diffuse_init(block_counts(sim.snapshots[0], sim.truth.classes[0]));
  SearchConfig search;
  search.max_iter = 400;
  const FitStepResult step = fit_step(sim.snapshots[1], sim.truth.classes[0], init, cfg, search);

  const FilterState pred = predict(init, cfg);
  const BlockStats stats = block_counts(sim.snapshots[1], step.assignment);
  const PosteriorScore fresh = log_posterior(stats, step.state.mean, pred.mean, pred.cov);
  CHECK(step.score.value() == doctest::Approx(fresh.value()).epsilon(1e-10));
}
