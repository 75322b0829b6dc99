#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dynsbm/ekf.hpp"
#include "dynsbm/graph.hpp"
#include "dynsbm/rng.hpp"
#include "dynsbm/types.hpp"

namespace dynsbm {

/// Weighted particle cloud (particles are rows).
struct ParticleEnsemble {
  Mat particles;  // N x dim
  Vec weights;    // nonnegative, summing to 1
  int t = 0;
};

/// Bootstrap particle filter over the linear-Gaussian dynamics of a
/// StateSpaceConfig, with an arbitrary per-step observation
/// log-likelihood. Weights are handled in the log domain; systematic
/// resampling triggers when the effective sample size drops below N/2.
class BootstrapFilter {
 public:
  /// Writes the log-likelihood of the current observation for every
  /// particle (row of `particles`) into `log_weights`.
  using LogLikFn = std::function<void(const Mat& particles, Vec& log_weights)>;

  BootstrapFilter(const StateSpaceConfig& cfg, int n_particles, std::uint64_t seed);

  /// Draw the initial cloud from N(mean, cov) with uniform weights.
  void init_gaussian(const Vec& mean, const Mat& cov);
  /// Draw the initial cloud from an axis-aligned Gaussian (the diffuse
  /// start used for the blockmodel: posterior of the first observation).
  void init_diagonal(const Vec& mean, const Vec& var);

  /// Propagate through the dynamics, weight by the observation
  /// likelihood, then resample if needed. Weighted mean/covariance are
  /// taken before resampling.
  void step(const LogLikFn& loglik);

  Vec mean() const;
  Mat covariance() const;
  double effective_sample_size() const;
  const ParticleEnsemble& ensemble() const { return ensemble_; }

 private:
  void normalize_and_maybe_resample(const Vec& log_weights);

  StateSpaceConfig cfg_;
  Mat walk_factor_;  // L with L L^T = process_cov
  ParticleEnsemble ensemble_;
  Rng rng_;
};

enum class ObsLikelihood { Gaussian, Binomial };

struct PfEstimate {
  Vec mean;
  Mat cov;
};

/// Particle-filter state estimates for a block-density sequence.
/// Gaussian mode weights y against the plug-in normal approximation with
/// per-particle variance theta(1-theta)/n; Binomial mode uses the exact
/// edge-count likelihood of m given n. With cfg.diffuse_init the cloud is
/// initialized from the transformed first observation exactly like
/// diffuse_init, so all estimators share the same start.
std::vector<PfEstimate> pf_filter(const std::vector<BlockStats>& observations,
                                  const StateSpaceConfig& cfg, int n_particles,
                                  ObsLikelihood likelihood, std::uint64_t seed);

}  // namespace dynsbm
