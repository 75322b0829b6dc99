#include "dynsbm/graph.hpp"

#include <algorithm>
#include <string>

namespace dynsbm {

Snapshot::Snapshot(int t, int n_nodes, std::vector<Edge> edges, bool undirected)
    : t_(t), n_nodes_(n_nodes), undirected_(undirected), edges_(std::move(edges)) {
  if (n_nodes_ < 0) throw ConfigError("snapshot: negative node count");
  for (const auto& [i, j] : edges_) {
    if (i == j)
      throw ConfigError("snapshot t=" + std::to_string(t_) + ": self-edge at node " +
                        std::to_string(i));
    if (i < 0 || i >= n_nodes_ || j < 0 || j >= n_nodes_)
      throw ConfigError("snapshot t=" + std::to_string(t_) + ": node id out of range: (" +
                        std::to_string(i) + "," + std::to_string(j) + ")");
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  if (undirected_) {
    for (const auto& [i, j] : edges_)
      if (!std::binary_search(edges_.begin(), edges_.end(), Edge{j, i}))
        throw ConfigError("snapshot t=" + std::to_string(t_) +
                          ": undirected flag but edge set not symmetric at (" +
                          std::to_string(i) + "," + std::to_string(j) + ")");
  }
  out_.resize(n_nodes_);
  in_.resize(n_nodes_);
  for (const auto& [i, j] : edges_) {
    out_[i].push_back(j);
    in_[j].push_back(i);
  }
}

bool Snapshot::has_edge(int i, int j) const {
  return std::binary_search(edges_.begin(), edges_.end(), Edge{i, j});
}

ClassAssignment::ClassAssignment(std::vector<int> labels, int k)
    : labels_(std::move(labels)), k_(k) {
  if (k_ < 1) throw ConfigError("assignment: k must be >= 1");
  std::vector<std::int64_t> sizes(k_, 0);
  for (int c : labels_) {
    if (c < 0 || c >= k_)
      throw ConfigError("assignment: label " + std::to_string(c) + " outside 0.." +
                        std::to_string(k_ - 1));
    ++sizes[c];
  }
  for (int c = 0; c < k_; ++c)
    if (sizes[c] == 0) throw ConfigError("assignment: class " + std::to_string(c) + " is empty");
}

std::vector<std::int64_t> ClassAssignment::class_sizes() const {
  std::vector<std::int64_t> sizes(k_, 0);
  for (int c : labels_) ++sizes[c];
  return sizes;
}

Vec BlockStats::m_vec() const { return stack_columns(m.cast<double>()); }

Vec BlockStats::n_vec() const { return stack_columns(n.cast<double>()); }

Vec BlockStats::clamped_density_vec() const {
  const int kk = k() * k();
  Vec out(kk);
  for (int i = 0; i < kk; ++i) {
    auto [a, b] = cell_of(i, k());
    out[i] = clamp_density(y(a, b), n(a, b));
  }
  return out;
}

CountMat possible_edge_counts(const std::vector<std::int64_t>& sizes) {
  const int k = static_cast<int>(sizes.size());
  CountMat n(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) n(a, b) = (a == b) ? sizes[a] * (sizes[a] - 1) : sizes[a] * sizes[b];
  return n;
}

double clamp_density(double y, std::int64_t n_ab) {
  const double bound = 1.0 / (2.0 * static_cast<double>(n_ab));
  return std::min(std::max(y, bound), 1.0 - bound);
}

namespace {

void check_sizes(const std::vector<std::int64_t>& sizes) {
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    if (sizes[c] == 0)
      throw ConfigError("block counts: class " + std::to_string(c) + " is empty");
    if (sizes[c] == 1)
      throw ConfigError("block counts: class " + std::to_string(c) +
                        " has a single member; its diagonal block has no possible edges");
  }
}

}  // namespace

BlockStats block_counts(const Snapshot& snapshot, const ClassAssignment& assignment) {
  if (assignment.n_nodes() != snapshot.n_nodes())
    throw ConfigError("block counts: assignment covers " + std::to_string(assignment.n_nodes()) +
                      " nodes, snapshot has " + std::to_string(snapshot.n_nodes()));
  const int k = assignment.k();
  const auto sizes = assignment.class_sizes();
  check_sizes(sizes);

  BlockStats s;
  s.m = CountMat::Zero(k, k);
  for (const auto& [i, j] : snapshot.edges()) ++s.m(assignment.label(i), assignment.label(j));
  s.n = possible_edge_counts(sizes);
  s.y = s.m.cast<double>().cwiseQuotient(s.n.cast<double>());
  return s;
}

MutableBlockCounts::MutableBlockCounts(const Snapshot& snapshot, std::vector<int> labels, int k)
    : snap_(&snapshot), k_(k), labels_(std::move(labels)) {
  const int n = snapshot.n_nodes();
  if (static_cast<int>(labels_.size()) != n)
    throw ConfigError("block counts: labels length does not match snapshot");
  sizes_.assign(k_, 0);
  m_ = CountMat::Zero(k_, k_);
  out_class_ = Eigen::MatrixXi::Zero(n, k_);
  in_class_ = Eigen::MatrixXi::Zero(n, k_);
  for (int i = 0; i < n; ++i) {
    if (labels_[i] >= k_ || (labels_[i] < 0 && labels_[i] != kUnplaced))
      throw ConfigError("block counts: label out of range");
    if (labels_[i] >= 0) ++sizes_[labels_[i]];
  }
  for (const auto& [i, j] : snapshot.edges()) {
    if (labels_[i] >= 0 && labels_[j] >= 0) ++m_(labels_[i], labels_[j]);
    if (labels_[j] >= 0) ++out_class_(i, labels_[j]);
    if (labels_[i] >= 0) ++in_class_(j, labels_[i]);
  }
}

void MutableBlockCounts::apply_move(int i, int to) {
  const int from = labels_[i];
  if (from == kUnplaced) throw ConfigError("apply_move: node is unplaced");
  if (from == to) return;
  for (int c = 0; c < k_; ++c) {
    m_(from, c) -= out_class_(i, c);
    m_(to, c) += out_class_(i, c);
    m_(c, from) -= in_class_(i, c);
    m_(c, to) += in_class_(i, c);
  }
  for (int j : snap_->out_neighbors(i)) {
    --in_class_(j, from);
    ++in_class_(j, to);
  }
  for (int j : snap_->in_neighbors(i)) {
    --out_class_(j, from);
    ++out_class_(j, to);
  }
  --sizes_[from];
  ++sizes_[to];
  labels_[i] = to;
}

void MutableBlockCounts::counts(Vec& m_vec, Vec& n_vec) const {
  const int kk = k_ * k_;
  m_vec.resize(kk);
  n_vec.resize(kk);
  for (int idx = 0; idx < kk; ++idx) {
    auto [a, b] = cell_of(idx, k_);
    m_vec[idx] = static_cast<double>(m_(a, b));
    n_vec[idx] = static_cast<double>(a == b ? sizes_[a] * (sizes_[a] - 1) : sizes_[a] * sizes_[b]);
  }
}

void MutableBlockCounts::moved_counts(int i, int to, Vec& m_vec, Vec& n_vec) const {
  const int from = labels_[i];
  const int kk = k_ * k_;
  m_vec.resize(kk);
  n_vec.resize(kk);
  for (int idx = 0; idx < kk; ++idx) {
    auto [a, b] = cell_of(idx, k_);
    std::int64_t mv = m_(a, b);
    if (from != to) {
      if (a == from) mv -= out_class_(i, b);
      if (a == to) mv += out_class_(i, b);
      if (b == from) mv -= in_class_(i, a);
      if (b == to) mv += in_class_(i, a);
    }
    std::int64_t sa = sizes_[a] + (from != to ? (a == to) - (a == from) : 0);
    std::int64_t sb = sizes_[b] + (from != to ? (b == to) - (b == from) : 0);
    m_vec[idx] = static_cast<double>(mv);
    n_vec[idx] = static_cast<double>(a == b ? sa * (sa - 1) : sa * sb);
  }
}

void MutableBlockCounts::add_node(int i, int c) {
  if (labels_[i] != kUnplaced) throw ConfigError("add_node: node already placed");
  for (int j : snap_->out_neighbors(i)) {
    if (labels_[j] >= 0) {
      ++m_(c, labels_[j]);
      ++in_class_(j, c);
    }
  }
  for (int j : snap_->in_neighbors(i)) {
    if (labels_[j] >= 0) {
      ++m_(labels_[j], c);
      ++out_class_(j, c);
    }
  }
  labels_[i] = c;
  ++sizes_[c];
}

void MutableBlockCounts::placed_counts(int i, int c, Vec& m_vec, Vec& n_vec) const {
  if (labels_[i] != kUnplaced) throw ConfigError("placed_counts: node already placed");
  const int kk = k_ * k_;
  m_vec.resize(kk);
  n_vec.resize(kk);
  for (int idx = 0; idx < kk; ++idx) {
    auto [a, b] = cell_of(idx, k_);
    std::int64_t mv = m_(a, b);
    if (a == c) mv += out_class_(i, b);
    if (b == c) mv += in_class_(i, a);
    std::int64_t sa = sizes_[a] + (a == c);
    std::int64_t sb = sizes_[b] + (b == c);
    m_vec[idx] = static_cast<double>(mv);
    n_vec[idx] = static_cast<double>(a == b ? sa * (sa - 1) : sa * sb);
  }
}

BlockStats MutableBlockCounts::stats() const {
  check_sizes(sizes_);
  BlockStats s;
  s.m = m_;
  s.n = possible_edge_counts(sizes_);
  s.y = s.m.cast<double>().cwiseQuotient(s.n.cast<double>());
  return s;
}

}  // namespace dynsbm
