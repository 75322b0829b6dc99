#include "dynsbm/kmeans.hpp"

#include <limits>
#include <random>

#include "dynsbm/errors.hpp"
#include "dynsbm/rng.hpp"

namespace dynsbm {

namespace {

double sq_dist(const Mat& points, int i, const Mat& centroids, int c) {
  return (points.row(i) - centroids.row(c)).squaredNorm();
}

Mat seed_centroids_plusplus(const Mat& points, int k, Rng& rng) {
  const int n = static_cast<int>(points.rows());
  Mat centroids(k, points.cols());
  std::uniform_int_distribution<int> first(0, n - 1);
  centroids.row(0) = points.row(first(rng));

  Vec d2(n);
  for (int i = 0; i < n; ++i) d2[i] = sq_dist(points, i, centroids, 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    int pick = 0;
    if (total > 0.0) {
      // sample proportional to squared distance
      double target = unif(rng) * total;
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);  // all points coincide with chosen centroids
    }
    centroids.row(c) = points.row(pick);
    for (int i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(points, i, centroids, c));
  }
  return centroids;
}

/// One restart of Lloyd's algorithm; returns (labels, centroids, objective).
KMeansResult lloyd(const Mat& points, int k, Rng& rng, int max_iter) {
  const int n = static_cast<int>(points.rows());
  Mat centroids = seed_centroids_plusplus(points, k, rng);
  std::vector<int> labels(n, 0);

  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(points, i, centroids, 0);
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist(points, i, centroids, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }

    // empty-cluster repair: move in the point farthest from its centroid
    std::vector<int> counts(k, 0);
    for (int c : labels) ++counts[c];
    for (int c = 0; c < k; ++c) {
      while (counts[c] == 0) {
        int far = -1;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
          if (counts[labels[i]] <= 1) continue;  // would empty another cluster
          const double d = sq_dist(points, i, centroids, labels[i]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        if (far < 0) throw NumericalError("kmeans: cannot repair empty cluster");
        --counts[labels[far]];
        labels[far] = c;
        ++counts[c];
        centroids.row(c) = points.row(far);
        changed = true;
      }
    }

    // recompute centroids
    Mat sums = Mat::Zero(k, points.cols());
    for (int i = 0; i < n; ++i) sums.row(labels[i]) += points.row(i);
    for (int c = 0; c < k; ++c) centroids.row(c) = sums.row(c) / static_cast<double>(counts[c]);

    if (!changed && iter > 0) break;
  }

  double objective = 0.0;
  for (int i = 0; i < n; ++i) objective += sq_dist(points, i, centroids, labels[i]);
  return {std::move(labels), std::move(centroids), objective};
}

}  // namespace

KMeansResult kmeans(const Mat& points, int k, std::uint64_t seed, int restarts, int max_iter) {
  const int n = static_cast<int>(points.rows());
  if (k < 1 || k > n) throw ConfigError("kmeans: need 1 <= k <= n");
  if (k == 1) {
    Mat centroid = points.colwise().mean();
    double obj = 0.0;
    for (int i = 0; i < n; ++i) obj += (points.row(i) - centroid.row(0)).squaredNorm();
    return {std::vector<int>(n, 0), std::move(centroid), obj};
  }

  KMeansResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    KMeansResult res = lloyd(points, k, rng, max_iter);
    if (res.objective < best.objective) best = std::move(res);
  }
  return best;
}

}  // namespace dynsbm
