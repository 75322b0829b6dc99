#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dynsbm/errors.hpp"
#include "dynsbm/types.hpp"

namespace dynsbm {

using Edge = std::pair<int, int>;

/// One time step of a dynamic graph: directed edges (i, j), i != j, over
/// dense node ids 0..n_nodes-1. Self-edges are rejected. A snapshot
/// flagged undirected stores both orientations of every edge, so the
/// block counting below applies unchanged (ordered-pair convention).
///
/// Immutable after construction; adjacency lists are built once.
class Snapshot {
 public:
  Snapshot(int t, int n_nodes, std::vector<Edge> edges, bool undirected = false);

  int t() const { return t_; }
  int n_nodes() const { return n_nodes_; }
  bool undirected() const { return undirected_; }

  /// Sorted, deduplicated ordered pairs.
  const std::vector<Edge>& edges() const { return edges_; }
  std::int64_t n_edges() const { return static_cast<std::int64_t>(edges_.size()); }

  const std::vector<int>& out_neighbors(int i) const { return out_[i]; }
  const std::vector<int>& in_neighbors(int i) const { return in_[i]; }
  bool has_edge(int i, int j) const;

 private:
  int t_ = 1;
  int n_nodes_ = 0;
  bool undirected_ = false;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> out_, in_;
};

/// Per-node class labels 0..k-1 with every class nonempty.
/// File formats use 1-based class labels; in memory labels are 0-based.
class ClassAssignment {
 public:
  ClassAssignment(std::vector<int> labels, int k);

  int k() const { return k_; }
  int n_nodes() const { return static_cast<int>(labels_.size()); }
  int label(int i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }
  std::vector<std::int64_t> class_sizes() const;

 private:
  std::vector<int> labels_;
  int k_;
};

/// Block sufficient statistics: observed edge counts m_ab, possible-edge
/// counts n_ab and raw densities y_ab = m_ab / n_ab.
struct BlockStats {
  CountMat m;
  CountMat n;
  Mat y;

  int k() const { return static_cast<int>(m.rows()); }
  /// Column-stacked counts as doubles (exact below 2^53).
  Vec m_vec() const;
  Vec n_vec() const;
  /// Column-stacked densities clamped to the open interval (see clamp_density).
  Vec clamped_density_vec() const;
};

/// Number of possible ordered edges per block: |a||b| off-diagonal,
/// |a|(|a|-1) on the diagonal.
CountMat possible_edge_counts(const std::vector<std::int64_t>& sizes);

/// Clamp a density into (0, 1) with half-count bounds 1/(2 n_ab) so that
/// its logit stays finite.
double clamp_density(double y, std::int64_t n_ab);

/// Count observed edges per block and derive densities.
/// Throws ConfigError for empty classes and for singleton classes (whose
/// diagonal block has no possible edges).
BlockStats block_counts(const Snapshot& snapshot, const ClassAssignment& assignment);

/// Block edge counts maintained incrementally under single-node
/// relabeling. Used by the label-switching search, where every candidate
/// move touches only two rows and two columns of m.
///
/// Labels may contain kUnplaced (-1) for nodes not yet assigned; such
/// nodes contribute no counts until placed with add_node.
class MutableBlockCounts {
 public:
  static constexpr int kUnplaced = -1;

  MutableBlockCounts(const Snapshot& snapshot, std::vector<int> labels, int k);

  int k() const { return k_; }
  int label(int i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<std::int64_t>& sizes() const { return sizes_; }
  const CountMat& m() const { return m_; }

  /// Relabel a placed node (updates counts in O(deg(i) + k)).
  void apply_move(int i, int to);

  /// Place an unplaced node into class c.
  void add_node(int i, int c);

  /// Column-stacked (m, n) for the current labeling.
  void counts(Vec& m_vec, Vec& n_vec) const;
  /// Column-stacked (m, n) that relabeling placed node i to `to` would
  /// produce; does not mutate.
  void moved_counts(int i, int to, Vec& m_vec, Vec& n_vec) const;
  /// Column-stacked (m, n) that placing unplaced node i into class c
  /// would produce; does not mutate.
  void placed_counts(int i, int c, Vec& m_vec, Vec& n_vec) const;

  /// Materialize full BlockStats (validates like block_counts).
  BlockStats stats() const;

 private:
  const Snapshot* snap_;
  int k_;
  std::vector<int> labels_;
  std::vector<std::int64_t> sizes_;
  CountMat m_;
  // per-node edge counts into each class over placed endpoints only
  Eigen::MatrixXi out_class_, in_class_;
};

}  // namespace dynsbm
