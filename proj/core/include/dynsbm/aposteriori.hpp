#pragma once

#include <cstdint>

#include "dynsbm/ekf.hpp"
#include "dynsbm/graph.hpp"
#include "dynsbm/types.hpp"

namespace dynsbm {

/// Log posterior of the state given the current snapshot, up to a
/// constant: blockmodel data term plus Gaussian prior quadratic.
struct PosteriorScore {
  double data_term = 0.0;
  double prior_term = 0.0;

  double value() const { return data_term + prior_term; }
};

struct SearchConfig {
  /// Upper bound on accepted single-node moves per time step. The search
  /// normally stops earlier, at a local maximum.
  int max_iter = 20;
  /// Evaluate neighboring assignments on multiple threads. The reduction
  /// is deterministic, so results match the serial path.
  bool parallel = false;
  int n_threads = 0;  // 0 = hardware concurrency
};

/// Gaussian prior N(mean, cov) with the Cholesky factor computed once and
/// shared across all neighbor evaluations of one time step.
class GaussianPrior {
 public:
  GaussianPrior(Vec mean, Mat cov);

  const Vec& mean() const { return mean_; }
  const Mat& cov() const { return cov_; }
  /// -1/2 (psi - mean)^T cov^{-1} (psi - mean)
  double log_quadratic(const Vec& psi) const;

 private:
  Vec mean_;
  Mat cov_;
  Eigen::LLT<Mat> llt_;
};

/// Blockmodel data term at logit-scale state psi:
/// sum_i m_i log h(psi_i) + (n_i - m_i) log(1 - h(psi_i)), computed
/// through softplus so saturated states stay finite.
double blockmodel_data_term(const Vec& m_vec, const Vec& n_vec, const Vec& psi);

PosteriorScore log_posterior(const BlockStats& stats, const Vec& psi, const GaussianPrior& prior);
PosteriorScore log_posterior(const BlockStats& stats, const Vec& psi, const Vec& pred_mean,
                             const Mat& pred_cov);

struct FitStepResult {
  FilterState state;
  ClassAssignment assignment;
  PosteriorScore score;
  int iterations = 0;  // accepted moves
};

/// One time step of a posteriori inference: carry the previous
/// assignment over (dropping departed nodes, greedily placing new ones),
/// then best-improvement label switching scored by the log posterior,
/// with the EKF update recomputed for every candidate assignment.
/// Moves that would leave a class with fewer than two members are
/// skipped, since the diagonal block counts degenerate below that.
FitStepResult fit_step(const Snapshot& snapshot, const ClassAssignment& prev_assignment,
                       const FilterState& prev_state, const StateSpaceConfig& cfg,
                       const SearchConfig& search);

/// First time step: spectral initialization, label switching under a
/// flat prior (the diffuse start makes the prior term vanish), then the
/// diffuse filter state for the accepted assignment.
FitStepResult fit_initial(const Snapshot& snapshot, int k, const SearchConfig& search,
                          std::uint64_t seed);

}  // namespace dynsbm
