#pragma once

#include <map>
#include <string>
#include <vector>

#include "dynsbm/ekf.hpp"
#include "dynsbm/graph.hpp"
#include "dynsbm/simgen.hpp"
#include "dynsbm/types.hpp"

namespace dynsbm {

/// Adjusted Rand index of two partitions (Hubert–Arabie, permutation
/// model). 1 iff identical up to relabeling; 0 at chance level. When the
/// correction denominator degenerates (both partitions trivial) returns
/// 1 for identical partitions, else 0.
double adjusted_rand(const std::vector<int>& a, const std::vector<int>& b);
double adjusted_rand(const ClassAssignment& a, const ClassAssignment& b);

/// Class permutation maximizing the matched node count of the
/// contingency table (exhaustive for k <= 8, Hungarian assignment
/// above). perm[estimated] = truth label.
std::vector<int> best_class_permutation(const Mat& contingency);
std::vector<int> best_class_permutation(const std::vector<std::vector<int>>& est,
                                        const std::vector<std::vector<int>>& truth, int k);

/// Apply a class permutation to a column-stacked k x k state:
/// out[perm[a], perm[b]] = psi[a, b].
Vec permute_state(const Vec& psi, const std::vector<int>& perm, int k);

/// Mean over time of the squared distance between estimated and true
/// logit states.
double tracking_mse(const std::vector<Vec>& estimates, const std::vector<Vec>& truth);
double tracking_mse(const std::vector<FilterState>& estimates, const GroundTruth& truth);

/// Same, but first aligns the estimate's class labels to the truth by
/// the agreement-maximizing permutation over the aggregate contingency
/// table of the per-step assignments.
double tracking_mse_aligned(const std::vector<FilterState>& estimates,
                            const std::vector<ClassAssignment>& est_classes,
                            const GroundTruth& truth);
double tracking_mse_aligned(const std::vector<Vec>& psi_est,
                            const std::vector<std::vector<int>>& est_labels,
                            const std::vector<std::vector<int>>& truth_labels,
                            const std::vector<Vec>& truth_psi, int k);

/// Scalar metrics plus per-time-step series, with simple aggregation.
struct MetricReport {
  std::map<std::string, double> scalars;
  std::map<std::string, std::vector<double>> series;

  struct Summary {
    double min, q25, median, q75, max;
  };
  static Summary summarize(std::vector<double> values);
};

/// Median of a copy of the values (NaN-free input expected).
double median(std::vector<double> values);

}  // namespace dynsbm
