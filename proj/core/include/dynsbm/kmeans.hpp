#pragma once

#include <cstdint>
#include <vector>

#include "dynsbm/types.hpp"

namespace dynsbm {

struct KMeansResult {
  std::vector<int> labels;
  Mat centroids;      // k x dim
  double objective;   // sum of squared distances to assigned centroid
};

/// Lloyd's algorithm with k-means++ seeding. Runs `restarts` independent
/// restarts and keeps the lowest objective (ties by restart index).
/// Empty clusters are repaired by moving in the point farthest from its
/// centroid. Deterministic given the seed.
KMeansResult kmeans(const Mat& points, int k, std::uint64_t seed, int restarts = 10,
                    int max_iter = 100);

}  // namespace dynsbm
