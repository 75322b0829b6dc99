#pragma once

#include <cstdint>
#include <vector>

#include "dynsbm/graph.hpp"
#include "dynsbm/types.hpp"

namespace dynsbm {

struct SimParams {
  int n_nodes = 128;
  int k = 4;
  double theta_diag_mean = 0.2580;
  double theta_offdiag_mean = 0.0834;
  double gamma0_scale = 0.04;
  double s_diag = 0.01;
  double s_nb = 0.0025;
  double churn_fraction = 0.10;
  int T = 10;
  bool directed = false;
  std::uint64_t seed = 1;
};

/// Latent trajectory behind a generated sequence.
struct GroundTruth {
  std::vector<Vec> psi;       // per t, column-stacked logit states
  std::vector<Mat> theta;     // logistic(psi) reshaped k x k
  std::vector<ClassAssignment> classes;
};

struct Simulation {
  std::vector<Snapshot> snapshots;
  GroundTruth truth;
};

/// Draw a dynamic blockmodel sequence: psi_0 ~ N(mu0, gamma0_scale I)
/// with mu0 the logit of the mean theta, a Gaussian random walk on the
/// logit scale with neighbor-structured increments, per-step membership
/// churn, and edgewise Bernoulli snapshots. Undirected mode samples each
/// unordered pair once and mirrors it.
///
/// The draw order per step is fixed (state walk, then churn, then edges)
/// so that seeds remain stable.
Simulation generate(const SimParams& params);

}  // namespace dynsbm
