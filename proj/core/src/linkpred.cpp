#include "dynsbm/linkpred.hpp"

#include <algorithm>
#include <cmath>

#include "dynsbm/errors.hpp"

namespace dynsbm {

namespace {

constexpr double kExhaustivePairLimit = 1e7;

void collect_pairs(const ScoreMatrix& scores, const Snapshot& truth,
                   std::vector<std::pair<double, int>>& out) {
  const int n = truth.n_nodes();
  if (scores.n_nodes() < n) throw ConfigError("auc: score matrix smaller than snapshot");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      out.emplace_back(scores.values(i, j), truth.has_edge(i, j) ? 1 : 0);
    }
}

double auc_from_pairs(std::vector<std::pair<double, int>>& pairs) {
  std::vector<double> pos_scores, neg_scores;
  for (const auto& [s, l] : pairs) (l == 1 ? pos_scores : neg_scores).push_back(s);
  if (pos_scores.empty() || neg_scores.empty())
    throw ConfigError("auc: undefined, needs both an edge and a non-edge");

  const double n_comparisons =
      static_cast<double>(pos_scores.size()) * static_cast<double>(neg_scores.size());
  if (n_comparisons <= kExhaustivePairLimit) {
    // exhaustive pair counting
    double wins = 0.0;
    for (double sp : pos_scores)
      for (double sn : neg_scores) {
        if (sp > sn)
          wins += 1.0;
        else if (sp == sn)
          wins += 0.5;
      }
    return wins / n_comparisons;
  }

  // midrank statistic; identical to pair counting including ties
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < pairs.size()) {
    std::size_t j = i;
    while (j + 1 < pairs.size() && pairs[j + 1].first == pairs[i].first) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t u = i; u <= j; ++u)
      if (pairs[u].second == 1) rank_sum_pos += midrank;
    i = j + 1;
  }
  const double p = static_cast<double>(pos_scores.size());
  return (rank_sum_pos - 0.5 * p * (p + 1.0)) / n_comparisons;
}

}  // namespace

ScoreMatrix ewma_predict(const std::vector<Snapshot>& history, double lambda) {
  if (history.empty()) throw ConfigError("ewma_predict: empty history");
  if (lambda < 0.0 || lambda > 1.0) throw ConfigError("ewma_predict: lambda outside [0,1]");
  int n = 0;
  for (const auto& s : history) n = std::max(n, s.n_nodes());

  Mat hat = Mat::Zero(n, n);
  for (const auto& [i, j] : history.front().edges()) hat(i, j) = 1.0;
  for (std::size_t t = 1; t < history.size(); ++t) {
    Mat w = Mat::Zero(n, n);
    for (const auto& [i, j] : history[t].edges()) w(i, j) = 1.0;
    hat = lambda * hat + (1.0 - lambda) * w;
  }
  return ScoreMatrix(std::move(hat));
}

ScoreMatrix block_predict(const FilterState& state, const ClassAssignment& assignment) {
  const int k = assignment.k();
  if (state.dim() != k * k) throw ConfigError("block_predict: state and assignment disagree on k");
  const Vec theta = logistic_vec(state.mean);
  const int n = assignment.n_nodes();
  ScoreMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      out.values(i, j) = theta[cell_index(assignment.label(i), assignment.label(j), k)];
    }
  return out;
}

ScoreMatrix blend(const ScoreMatrix& block, const ScoreMatrix& ewma, double w_block) {
  if (block.n_nodes() != ewma.n_nodes()) throw ConfigError("blend: shape mismatch");
  if (w_block < 0.0 || w_block > 1.0) throw ConfigError("blend: weight outside [0,1]");
  return ScoreMatrix(w_block * block.values + (1.0 - w_block) * ewma.values);
}

double auc(const ScoreMatrix& scores, const Snapshot& truth) {
  std::vector<std::pair<double, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(truth.n_nodes()) * (truth.n_nodes() - 1));
  collect_pairs(scores, truth, pairs);
  return auc_from_pairs(pairs);
}

double auc_micro(const std::vector<ScoreMatrix>& scores, const std::vector<Snapshot>& truth) {
  if (scores.size() != truth.size() || scores.empty())
    throw ConfigError("auc_micro: sequence length mismatch");
  std::vector<std::pair<double, int>> pairs;
  for (std::size_t t = 0; t < scores.size(); ++t) collect_pairs(scores[t], truth[t], pairs);
  return auc_from_pairs(pairs);
}

}  // namespace dynsbm
