#include "dynsbm/simgen.hpp"

#include <cmath>
#include <random>

#include "dynsbm/ekf.hpp"
#include "dynsbm/errors.hpp"
#include "dynsbm/rng.hpp"

namespace dynsbm {

namespace {

/// Lower-triangular factor L with L L^T = m, tolerating PSD-singular
/// matrices (zero process noise is a legitimate configuration).
Mat psd_sqrt(const Mat& m) {
  Eigen::LLT<Mat> llt(m);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  const double tol = -1e-12 * std::max(1.0, m.trace());
  if (es.eigenvalues().minCoeff() < tol)
    throw ConfigError("simgen: process covariance not PSD");
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace

Simulation generate(const SimParams& p) {
  if (p.T < 1) throw ConfigError("simgen: T must be >= 1");
  if (p.k < 1 || p.k > p.n_nodes) throw ConfigError("simgen: need 1 <= k <= n_nodes");
  if (!(p.theta_diag_mean > 0 && p.theta_diag_mean < 1) ||
      !(p.theta_offdiag_mean > 0 && p.theta_offdiag_mean < 1))
    throw ConfigError("simgen: mean edge probabilities must lie in (0,1)");
  if (p.churn_fraction < 0 || p.churn_fraction >= 1)
    throw ConfigError("simgen: churn fraction must lie in [0,1)");

  const int k = p.k;
  const int kk = k * k;
  const int n = p.n_nodes;

  Vec mu0(kk);
  for (int i = 0; i < kk; ++i) {
    auto [a, b] = cell_of(i, k);
    mu0[i] = logit(a == b ? p.theta_diag_mean : p.theta_offdiag_mean);
  }
  const Mat gamma = build_process_cov(k, p.s_diag, p.s_nb);
  const Mat walk_l = psd_sqrt(gamma);

  Rng rng(p.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // initial state and near-equal class split (remainder to low classes)
  Vec psi = mu0;
  for (int i = 0; i < kk; ++i) psi[i] += std::sqrt(p.gamma0_scale) * normal(rng);
  std::vector<int> labels(n);
  {
    const int base = n / k, rem = n % k;
    int node = 0;
    for (int c = 0; c < k; ++c)
      for (int j = 0; j < base + (c < rem ? 1 : 0); ++j) labels[node++] = c;
  }
  std::vector<std::int64_t> sizes(k, 0);
  for (int c : labels) ++sizes[c];

  Simulation sim;
  for (int t = 1; t <= p.T; ++t) {
    // 1) state walk
    Vec z(kk);
    for (int i = 0; i < kk; ++i) z[i] = normal(rng);
    psi += walk_l * z;

    // 2) churn (from t = 2): each node selected independently, moved to a
    //    uniform other class; selections that would shrink a class below
    //    two members are rejected and consume no further draws (the
    //    diagonal block counts degenerate below that)
    if (t > 1 && p.churn_fraction > 0.0) {
      for (int i = 0; i < n; ++i) {
        if (unif(rng) >= p.churn_fraction) continue;
        const int from = labels[i];
        if (sizes[from] <= 2) continue;
        std::uniform_int_distribution<int> pick(0, k - 2);
        int to = pick(rng);
        if (to >= from) ++to;
        labels[i] = to;
        --sizes[from];
        ++sizes[to];
      }
    }

    // 3) edges
    Mat theta(k, k);
    for (int i = 0; i < kk; ++i) {
      auto [a, b] = cell_of(i, k);
      theta(a, b) = logistic(psi[i]);
    }
    std::vector<Edge> edges;
    if (p.directed) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          if (unif(rng) < theta(labels[i], labels[j])) edges.emplace_back(i, j);
        }
    } else {
      // each unordered pair is sampled once; the state walk does not keep
      // theta symmetric, so the pair probability averages both directions
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          const double prob =
              0.5 * (theta(labels[i], labels[j]) + theta(labels[j], labels[i]));
          if (unif(rng) < prob) {
            edges.emplace_back(i, j);
            edges.emplace_back(j, i);
          }
        }
    }

    sim.snapshots.emplace_back(t, n, std::move(edges), !p.directed);
    sim.truth.psi.push_back(psi);
    sim.truth.theta.push_back(theta);
    sim.truth.classes.emplace_back(labels, k);
  }
  return sim;
}

}  // namespace dynsbm
