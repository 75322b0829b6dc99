#pragma once

#include <cstdint>

#include "dynsbm/graph.hpp"
#include "dynsbm/types.hpp"

namespace dynsbm {

/// Block edge-probability matrix with entries strictly inside (0, 1).
struct EdgeProbMatrix {
  Mat theta;

  int k() const { return static_cast<int>(theta.rows()); }
};

/// Static blockmodel log-likelihood over block sufficient statistics:
/// sum_ab m_ab log(theta_ab) + (n_ab - m_ab) log(1 - theta_ab).
double ssbm_loglikelihood(const BlockStats& stats, const EdgeProbMatrix& theta);

/// Maximum-likelihood edge probabilities: block densities, clamped into
/// the open interval so downstream logits stay finite.
EdgeProbMatrix ssbm_mle(const BlockStats& stats);

/// Spectral clustering of one snapshot: SVD of the raw adjacency, rows of
/// the concatenated scaled singular-vector embedding [U S^1/2, V S^1/2]
/// clustered by k-means. Deterministic given the seed.
ClassAssignment spectral_init(const Snapshot& snapshot, int k, std::uint64_t seed);

}  // namespace dynsbm
