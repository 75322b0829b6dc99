#include "dynsbm/aposteriori.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <future>
#include <thread>
#include <vector>

#include "dynsbm/errors.hpp"
#include "dynsbm/ssbm.hpp"

namespace dynsbm {

namespace {

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

/// Candidate evaluation: given tentative block counts, produce the
/// posterior score and the corresponding updated state mean.
using Evaluator = std::function<double(const Vec& m_vec, const Vec& n_vec, Vec* mean_out)>;

struct Candidate {
  double score;
  int node;
  int to;

  bool better_than(const Candidate& other) const {
    if (score != other.score) return score > other.score;
    if (node != other.node) return node < other.node;
    return to < other.to;
  }
};

/// Best single-node relabeling over nodes [begin, end). Moves that would
/// shrink the source class below two members are skipped.
Candidate scan_neighbors(const MutableBlockCounts& counts, const Evaluator& eval, int begin,
                         int end) {
  const int k = counts.k();
  Candidate best{-std::numeric_limits<double>::infinity(), -1, -1};
  Vec m_vec, n_vec;
  for (int i = begin; i < end; ++i) {
    const int from = counts.label(i);
    if (counts.sizes()[from] <= 2) continue;
    for (int to = 0; to < k; ++to) {
      if (to == from) continue;
      counts.moved_counts(i, to, m_vec, n_vec);
      Candidate cand{eval(m_vec, n_vec, nullptr), i, to};
      if (cand.better_than(best)) best = cand;
    }
  }
  return best;
}

Candidate scan_all(const MutableBlockCounts& counts, const Evaluator& eval,
                   const SearchConfig& search, int n_nodes) {
  if (!search.parallel || n_nodes < 32) return scan_neighbors(counts, eval, 0, n_nodes);
  int workers = search.n_threads > 0 ? search.n_threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, n_nodes));
  const int chunk = (n_nodes + workers - 1) / workers;
  std::vector<std::future<Candidate>> futures;
  for (int w = 0; w < workers; ++w) {
    const int begin = w * chunk;
    const int end = std::min(n_nodes, begin + chunk);
    if (begin >= end) break;
    futures.push_back(std::async(std::launch::async, [&, begin, end] {
      return scan_neighbors(counts, eval, begin, end);
    }));
  }
  Candidate best{-std::numeric_limits<double>::infinity(), -1, -1};
  for (auto& f : futures) {
    Candidate c = f.get();
    if (c.node >= 0 && c.better_than(best)) best = c;
  }
  return best;
}

/// Best-improvement hill climbing: each iteration visits every neighbor and
/// accepts the best strictly-improving one.
int local_search(MutableBlockCounts& counts, const Evaluator& eval, const SearchConfig& search,
                 double& current_score) {
  const int n = static_cast<int>(counts.labels().size());
  int moves = 0;
  for (int iter = 1; iter <= search.max_iter; ++iter) {
    const Candidate best = scan_all(counts, eval, search, n);
    if (best.node < 0 || !(best.score > current_score)) break;
    counts.apply_move(best.node, best.to);
    current_score = best.score;
    ++moves;
  }
  return moves;
}

void clamp_densities(const Vec& m_vec, const Vec& n_vec, Vec& y) {
  y.resize(m_vec.size());
  for (Eigen::Index i = 0; i < m_vec.size(); ++i)
    y[i] = clamp_density(m_vec[i] / n_vec[i], static_cast<std::int64_t>(n_vec[i]));
}

/// Per-time-step EKF evaluation machinery shared by all neighbor visits:
/// the prediction, its factorizations and the linearization are fixed;
/// only the observation (densities and plug-in noise) changes.
class EkfStepEvaluator {
 public:
  EkfStepEvaluator(const FilterState& pred)
      : prior_(pred.mean, pred.cov),
        h_pred_(logistic_vec(pred.mean)),
        h_jac_(jacobian_h(pred.mean)),
        rht_(pred.cov * h_jac_.asDiagonal()),
        hrh_(h_jac_.asDiagonal() * rht_) {}

  double operator()(const Vec& m_vec, const Vec& n_vec, Vec* mean_out) const {
    Vec y;
    clamp_densities(m_vec, n_vec, y);
    Mat innov = hrh_;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double theta = h_pred_[i];
      innov(i, i) += std::max(theta * (1.0 - theta) / n_vec[i], 1.0 / (4.0 * n_vec[i] * n_vec[i]));
    }
    Eigen::LLT<Mat> llt(innov);
    if (llt.info() != Eigen::Success) {
      const double jitter = 1e-10 * innov.trace() / static_cast<double>(innov.rows());
      innov.diagonal().array() += jitter;
      llt.compute(innov);
      if (llt.info() != Eigen::Success)
        throw NumericalError("fit_step: innovation covariance not PD after jitter");
    }
    const Vec mean = prior_.mean() + rht_ * llt.solve(y - h_pred_);
    const double score = blockmodel_data_term(m_vec, n_vec, mean) + prior_.log_quadratic(mean);
    if (mean_out) *mean_out = mean;
    return score;
  }

  const GaussianPrior& prior() const { return prior_; }

 private:
  GaussianPrior prior_;
  Vec h_pred_, h_jac_;
  Mat rht_;  // R H^T
  Mat hrh_;  // H R H^T
};

/// Flat-prior evaluation used at the first time step: the state is the
/// logit of the clamped densities and only the data term scores.
double flat_evaluate(const Vec& m_vec, const Vec& n_vec, Vec* mean_out) {
  Vec y;
  clamp_densities(m_vec, n_vec, y);
  const Vec mean = logit_vec(y);
  if (mean_out) *mean_out = mean;
  return blockmodel_data_term(m_vec, n_vec, mean);
}

/// Carry the previous labeling onto the current snapshot's node set.
/// Departed nodes are dropped; if that empties a class, the lowest-id
/// node of the largest class is reassigned into it. New nodes are marked
/// unplaced for greedy insertion.
std::vector<int> carry_over_labels(const ClassAssignment& prev, int n_now) {
  const int k = prev.k();
  std::vector<int> labels(prev.labels().begin(),
                          prev.labels().begin() + std::min(prev.n_nodes(), n_now));
  if (n_now > prev.n_nodes()) labels.resize(n_now, MutableBlockCounts::kUnplaced);

  std::vector<std::int64_t> sizes(k, 0);
  for (int c : labels)
    if (c >= 0) ++sizes[c];
  for (int c = 0; c < k; ++c) {
    while (sizes[c] == 0) {
      const auto largest = std::max_element(sizes.begin(), sizes.end()) - sizes.begin();
      if (sizes[largest] < 2)
        throw ConfigError("fit_step: too few nodes remain to keep every class nonempty");
      const auto it = std::find(labels.begin(), labels.end(), static_cast<int>(largest));
      *it = c;
      --sizes[largest];
      ++sizes[c];
    }
  }
  return labels;
}

}  // namespace

GaussianPrior::GaussianPrior(Vec mean, Mat cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size())
    throw ConfigError("prior: dimension mismatch");
  llt_.compute(cov_);
  if (llt_.info() != Eigen::Success) {
    const double jitter = 1e-10 * cov_.trace() / static_cast<double>(cov_.rows());
    Mat jittered = cov_;
    jittered.diagonal().array() += jitter;
    llt_.compute(jittered);
    if (llt_.info() != Eigen::Success)
      throw NumericalError("prior covariance not positive definite after jitter");
  }
}

double GaussianPrior::log_quadratic(const Vec& psi) const {
  const Vec d = psi - mean_;
  return -0.5 * d.dot(llt_.solve(d));
}

double blockmodel_data_term(const Vec& m_vec, const Vec& n_vec, const Vec& psi) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i)
    total -= m_vec[i] * softplus(-psi[i]) + (n_vec[i] - m_vec[i]) * softplus(psi[i]);
  return total;
}

PosteriorScore log_posterior(const BlockStats& stats, const Vec& psi, const GaussianPrior& prior) {
  PosteriorScore score;
  score.data_term = blockmodel_data_term(stats.m_vec(), stats.n_vec(), psi);
  score.prior_term = prior.log_quadratic(psi);
  return score;
}

PosteriorScore log_posterior(const BlockStats& stats, const Vec& psi, const Vec& pred_mean,
                             const Mat& pred_cov) {
  return log_posterior(stats, psi, GaussianPrior(pred_mean, pred_cov));
}

FitStepResult fit_step(const Snapshot& snapshot, const ClassAssignment& prev_assignment,
                       const FilterState& prev_state, const StateSpaceConfig& cfg,
                       const SearchConfig& search) {
  if (search.max_iter < 1) throw ConfigError("fit_step: max_iter must be >= 1");
  const int k = prev_assignment.k();
  const FilterState pred = predict(prev_state, cfg);
  const EkfStepEvaluator eval(pred);
  const Evaluator eval_fn = std::cref(eval);

  MutableBlockCounts counts(snapshot, carry_over_labels(prev_assignment, snapshot.n_nodes()), k);

  // greedy placement of newly appearing nodes, ascending id
  Vec m_vec, n_vec;
  for (int i = 0; i < snapshot.n_nodes(); ++i) {
    if (counts.label(i) != MutableBlockCounts::kUnplaced) continue;
    int best_c = 0;
    double best_s = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      counts.placed_counts(i, c, m_vec, n_vec);
      const double s = eval_fn(m_vec, n_vec, nullptr);
      if (s > best_s) {
        best_s = s;
        best_c = c;
      }
    }
    counts.add_node(i, best_c);
  }

  counts.counts(m_vec, n_vec);
  double current = eval_fn(m_vec, n_vec, nullptr);
  const int moves = local_search(counts, eval_fn, search, current);

  FitStepResult result{FilterState{}, ClassAssignment(counts.labels(), k), PosteriorScore{}, moves};
  const BlockStats stats = counts.stats();
  const Vec y = stats.clamped_density_vec();
  result.state = update(pred, y, plugin_obs_cov(pred.mean, stats.n));
  result.score.data_term = blockmodel_data_term(stats.m_vec(), stats.n_vec(), result.state.mean);
  result.score.prior_term = eval.prior().log_quadratic(result.state.mean);
  return result;
}

FitStepResult fit_initial(const Snapshot& snapshot, int k, const SearchConfig& search,
                          std::uint64_t seed) {
  if (search.max_iter < 1) throw ConfigError("fit_initial: max_iter must be >= 1");
  const ClassAssignment spectral = spectral_init(snapshot, k, seed);
  MutableBlockCounts counts(snapshot, spectral.labels(), k);

  const Evaluator eval_fn = flat_evaluate;
  Vec m_vec, n_vec;
  counts.counts(m_vec, n_vec);
  double current = eval_fn(m_vec, n_vec, nullptr);
  const int moves = local_search(counts, eval_fn, search, current);

  FitStepResult result{FilterState{}, ClassAssignment(counts.labels(), k), PosteriorScore{}, moves};
  const BlockStats stats = counts.stats();
  result.state = diffuse_init(stats);
  result.score.data_term = blockmodel_data_term(stats.m_vec(), stats.n_vec(), result.state.mean);
  result.score.prior_term = 0.0;
  return result;
}

}  // namespace dynsbm
