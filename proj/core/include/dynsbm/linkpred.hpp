#pragma once

#include <vector>

#include "dynsbm/ekf.hpp"
#include "dynsbm/graph.hpp"
#include "dynsbm/types.hpp"

namespace dynsbm {

/// Per-ordered-pair scores in [0,1]; the diagonal is unused and kept 0.
struct ScoreMatrix {
  Mat values;

  explicit ScoreMatrix(int n) : values(Mat::Zero(n, n)) {}
  explicit ScoreMatrix(Mat v) : values(std::move(v)) {}
  int n_nodes() const { return static_cast<int>(values.rows()); }
};

struct BlendConfig {
  double lambda = 0.5;   // EWMA decay
  double w_block = 0.5;  // weight of the block-level predictor
};

/// Exponentially weighted moving average of past adjacency matrices:
/// W_hat^{t+1} = lambda W_hat^t + (1 - lambda) W^t, with W_hat^1 = W^1.
/// Snapshots may differ in node count; the union node set is used and
/// absent nodes contribute zero rows.
ScoreMatrix ewma_predict(const std::vector<Snapshot>& history, double lambda);

/// Block-level scores: every ordered pair receives the edge probability
/// of its block under the updated filter state.
ScoreMatrix block_predict(const FilterState& state, const ClassAssignment& assignment);

/// Convex combination w_block * block + (1 - w_block) * ewma.
ScoreMatrix blend(const ScoreMatrix& block, const ScoreMatrix& ewma, double w_block);

/// Area under the ROC curve of the scores against the snapshot's edges
/// (Mann–Whitney form, ties counted 1/2). Exhaustive pair counting up to
/// 1e7 positive-negative pairs, midrank statistic above; both give
/// identical results. Throws ConfigError if only one class is present.
double auc(const ScoreMatrix& scores, const Snapshot& truth);

/// Micro-averaged AUC: pairs pooled across time steps.
double auc_micro(const std::vector<ScoreMatrix>& scores, const std::vector<Snapshot>& truth);

}  // namespace dynsbm
