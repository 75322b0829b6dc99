#include "dynsbm/evalmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dynsbm/errors.hpp"

namespace dynsbm {

namespace {

int max_label(const std::vector<int>& x) { return *std::max_element(x.begin(), x.end()); }

/// Hungarian assignment maximizing the total of `score` (k x k), O(k^3).
std::vector<int> hungarian_max(const Mat& score) {
  const int k = static_cast<int>(score.rows());
  // classic potentials formulation on the minimization of -score
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
  std::vector<int> p(k + 1, 0), way(k + 1, 0);
  for (int i = 1; i <= k; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(k + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(k + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = std::numeric_limits<double>::infinity();
      int j1 = 0;
      for (int j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const double cur = -score(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> perm(k);
  for (int j = 1; j <= k; ++j) perm[p[j] - 1] = j - 1;
  return perm;
}

}  // namespace

double adjusted_rand(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw ConfigError("adjusted_rand: partitions differ in length");
  if (a.empty()) throw ConfigError("adjusted_rand: empty partitions");
  const int ka = max_label(a) + 1, kb = max_label(b) + 1;
  Mat table = Mat::Zero(ka, kb);
  for (std::size_t i = 0; i < a.size(); ++i) table(a[i], b[i]) += 1.0;

  auto choose2 = [](double x) { return 0.5 * x * (x - 1.0); };
  double index = 0.0;
  for (int i = 0; i < ka; ++i)
    for (int j = 0; j < kb; ++j) index += choose2(table(i, j));
  double sum_a = 0.0, sum_b = 0.0;
  for (int i = 0; i < ka; ++i) sum_a += choose2(table.row(i).sum());
  for (int j = 0; j < kb; ++j) sum_b += choose2(table.col(j).sum());
  const double total = choose2(static_cast<double>(a.size()));
  const double expected = total > 0.0 ? sum_a * sum_b / total : 0.0;
  const double max_index = 0.5 * (sum_a + sum_b);

  // degenerate correction (both partitions trivial): 1 iff identical as
  // partitions, which holds exactly when every co-membership pair agrees
  if (max_index == expected) return (index == sum_a && index == sum_b) ? 1.0 : 0.0;
  return (index - expected) / (max_index - expected);
}

double adjusted_rand(const ClassAssignment& a, const ClassAssignment& b) {
  return adjusted_rand(a.labels(), b.labels());
}

std::vector<int> best_class_permutation(const Mat& contingency) {
  const int k = static_cast<int>(contingency.rows());
  if (k > 8) return hungarian_max(contingency);
  std::vector<int> perm(k), best(k);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_score = -1.0;
  do {
    double s = 0.0;
    for (int a = 0; a < k; ++a) s += contingency(a, perm[a]);
    if (s > best_score) {
      best_score = s;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<int> best_class_permutation(const std::vector<std::vector<int>>& est,
                                        const std::vector<std::vector<int>>& truth, int k) {
  if (est.size() != truth.size()) throw ConfigError("permutation: sequence length mismatch");
  Mat table = Mat::Zero(k, k);
  for (std::size_t t = 0; t < est.size(); ++t) {
    if (est[t].size() != truth[t].size()) throw ConfigError("permutation: node count mismatch");
    for (std::size_t i = 0; i < est[t].size(); ++i) table(est[t][i], truth[t][i]) += 1.0;
  }
  return best_class_permutation(table);
}

Vec permute_state(const Vec& psi, const std::vector<int>& perm, int k) {
  Vec out(psi.size());
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      out[cell_index(perm[a], perm[b], k)] = psi[cell_index(a, b, k)];
  return out;
}

double tracking_mse(const std::vector<Vec>& estimates, const std::vector<Vec>& truth) {
  if (estimates.size() != truth.size() || estimates.empty())
    throw ConfigError("tracking_mse: sequence length mismatch");
  double total = 0.0;
  for (std::size_t t = 0; t < estimates.size(); ++t) {
    if (estimates[t].size() != truth[t].size()) throw ConfigError("tracking_mse: dimension mismatch");
    total += (estimates[t] - truth[t]).squaredNorm();
  }
  return total / static_cast<double>(estimates.size());
}

double tracking_mse(const std::vector<FilterState>& estimates, const GroundTruth& truth) {
  std::vector<Vec> means;
  means.reserve(estimates.size());
  for (const auto& s : estimates) means.push_back(s.mean);
  return tracking_mse(means, truth.psi);
}

double tracking_mse_aligned(const std::vector<Vec>& psi_est,
                            const std::vector<std::vector<int>>& est_labels,
                            const std::vector<std::vector<int>>& truth_labels,
                            const std::vector<Vec>& truth_psi, int k) {
  if (psi_est.size() != est_labels.size() || psi_est.size() != truth_psi.size())
    throw ConfigError("tracking_mse_aligned: sequence length mismatch");
  const std::vector<int> perm = best_class_permutation(est_labels, truth_labels, k);
  std::vector<Vec> aligned;
  aligned.reserve(psi_est.size());
  for (const auto& psi : psi_est) aligned.push_back(permute_state(psi, perm, k));
  return tracking_mse(aligned, truth_psi);
}

double tracking_mse_aligned(const std::vector<FilterState>& estimates,
                            const std::vector<ClassAssignment>& est_classes,
                            const GroundTruth& truth) {
  if (estimates.size() != est_classes.size() || estimates.size() != truth.psi.size())
    throw ConfigError("tracking_mse_aligned: sequence length mismatch");
  const int k = est_classes.front().k();
  std::vector<Vec> means;
  std::vector<std::vector<int>> est_labels, truth_labels;
  for (std::size_t t = 0; t < est_classes.size(); ++t) {
    means.push_back(estimates[t].mean);
    est_labels.push_back(est_classes[t].labels());
    truth_labels.push_back(truth.classes[t].labels());
  }
  return tracking_mse_aligned(means, est_labels, truth_labels, truth.psi, k);
}

double median(std::vector<double> values) {
  if (values.empty()) throw ConfigError("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

MetricReport::Summary MetricReport::summarize(std::vector<double> values) {
  if (values.empty()) throw ConfigError("summarize: empty input");
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
  };
  return Summary{values.front(), quantile(0.25), quantile(0.5), quantile(0.75), values.back()};
}

}  // namespace dynsbm
