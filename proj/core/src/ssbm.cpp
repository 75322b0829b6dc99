#include "dynsbm/ssbm.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "dynsbm/errors.hpp"
#include "dynsbm/kmeans.hpp"

namespace dynsbm {

double ssbm_loglikelihood(const BlockStats& stats, const EdgeProbMatrix& prob) {
  const int k = stats.k();
  if (prob.k() != k) throw ConfigError("ssbm_loglikelihood: dimension mismatch");
  double ll = 0.0;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      const double theta = prob.theta(a, b);
      if (!(theta > 0.0 && theta < 1.0))
        throw ConfigError("ssbm_loglikelihood: theta outside (0,1)");
      const double m = static_cast<double>(stats.m(a, b));
      const double n = static_cast<double>(stats.n(a, b));
      ll += m * std::log(theta) + (n - m) * std::log1p(-theta);
    }
  return ll;
}

EdgeProbMatrix ssbm_mle(const BlockStats& stats) {
  const int k = stats.k();
  Mat theta(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) theta(a, b) = clamp_density(stats.y(a, b), stats.n(a, b));
  return EdgeProbMatrix{std::move(theta)};
}

ClassAssignment spectral_init(const Snapshot& snapshot, int k, std::uint64_t seed) {
  const int n = snapshot.n_nodes();
  if (n < 1) throw ConfigError("spectral_init: empty snapshot");
  if (k > n) throw ConfigError("spectral_init: k exceeds node count");
  if (k == 1) return ClassAssignment(std::vector<int>(n, 0), 1);

  Mat adj = Mat::Zero(n, n);
  for (const auto& [i, j] : snapshot.edges()) adj(i, j) = 1.0;

  Eigen::BDCSVD<Mat> svd(adj, Eigen::ComputeThinU | Eigen::ComputeThinV);
  // Zero singular values yield zero embedding columns, which covers the
  // rank-deficient case.
  Mat embedding(n, 2 * k);
  for (int c = 0; c < k; ++c) {
    const double scale = std::sqrt(std::max(svd.singularValues()[c], 0.0));
    embedding.col(c) = svd.matrixU().col(c) * scale;
    embedding.col(k + c) = svd.matrixV().col(c) * scale;
  }

  KMeansResult km = kmeans(embedding, k, seed);
  return ClassAssignment(std::move(km.labels), k);
}

}  // namespace dynsbm
