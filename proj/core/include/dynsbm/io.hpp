#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dynsbm/ekf.hpp"
#include "dynsbm/graph.hpp"
#include "dynsbm/simgen.hpp"

namespace dynsbm {

/// External node labels mapped to dense 0-based ids in order of first
/// appearance.
struct NodeDict {
  std::vector<std::int64_t> id_to_label;
  std::unordered_map<std::int64_t, int> label_to_id;

  int intern(std::int64_t label);
  std::optional<int> lookup(std::int64_t label) const;
  int size() const { return static_cast<int>(id_to_label.size()); }
};

struct SnapshotData {
  std::vector<Snapshot> snapshots;
  NodeDict nodes;
  std::vector<int> inserted_gaps;  // time indices filled with empty snapshots
  int t_shift = 0;                 // applied to make time start at 1
};

/// Read `t<TAB>src<TAB>dst` lines (# comments ignored). Time steps are
/// compacted to start at 1; interior gaps become empty snapshots and are
/// reported. Duplicate edges are dropped; self-edges are an error. With
/// `undirected` every edge is reciprocated.
SnapshotData parse_snapshots(const std::string& path, bool undirected = false);

/// Read `node<TAB>class` (static, classes 1..k in the file). Nodes not
/// yet in the dictionary are appended, so membership-only nodes extend
/// the universe. Returns 0-based labels indexed by dense id.
std::vector<int> parse_memberships(const std::string& path, NodeDict& nodes);

/// Read `t<TAB>node<TAB>class` (per-step memberships).
std::vector<std::vector<int>> parse_memberships_per_step(const std::string& path, NodeDict& nodes,
                                                         int n_steps);

void write_snapshots(const std::string& path, const std::vector<Snapshot>& snapshots,
                     const NodeDict* nodes = nullptr);
void write_node_map(const std::string& path, const NodeDict& nodes);
void write_memberships_per_step(const std::string& path,
                                const std::vector<ClassAssignment>& classes,
                                const NodeDict* nodes = nullptr);

/// One row of the estimates table: block (a, b) at time t with the edge
/// probability, its 95% confidence bounds (computed on the logit scale
/// and mapped through the logistic) and the logit-scale variance.
struct EstimateRecord {
  int t = 0;
  int a = 0;  // 1-based in files
  int b = 0;
  double theta_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double var_logit = 0.0;
};

std::vector<EstimateRecord> make_estimates(const FilterState& state);

void write_estimates_csv(const std::string& path, const std::vector<EstimateRecord>& records);
std::vector<EstimateRecord> read_estimates_csv(const std::string& path);

void write_truth_psi_csv(const std::string& path, const GroundTruth& truth);
/// Returns per-t column-stacked psi vectors.
std::vector<Vec> read_truth_psi_csv(const std::string& path, int k);

/// Per-step assignments as `t,node,class` CSV (classes 1-based).
void write_assignments_csv(const std::string& path, const std::vector<ClassAssignment>& classes,
                           const NodeDict* nodes = nullptr);
/// Returns per-t labels indexed by dense id from the shared dictionary.
std::vector<std::vector<int>> read_assignments_csv(const std::string& path, NodeDict& nodes);

/// Probabilities and reals are printed with 10 significant digits.
std::string format_real(double value);

}  // namespace dynsbm
