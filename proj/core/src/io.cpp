#include "dynsbm/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "dynsbm/errors.hpp"

namespace dynsbm {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

std::int64_t parse_int(const std::string& field, const std::string& path, int line_no) {
  std::int64_t value = 0;
  const auto* begin = field.data();
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError(path + ":" + std::to_string(line_no) + ": expected integer, got '" + field +
                     "'");
  return value;
}

double parse_double(const std::string& field, const std::string& path, int line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(field, &pos);
    if (pos != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw ParseError(path + ":" + std::to_string(line_no) + ": expected real, got '" + field +
                     "'");
  }
}

bool skippable(const std::string& line) {
  for (char c : line)
    if (!std::isspace(static_cast<unsigned char>(c))) return c == '#';
  return true;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open for writing");
  return out;
}

}  // namespace

int NodeDict::intern(std::int64_t label) {
  auto [it, inserted] = label_to_id.try_emplace(label, size());
  if (inserted) id_to_label.push_back(label);
  return it->second;
}

std::optional<int> NodeDict::lookup(std::int64_t label) const {
  const auto it = label_to_id.find(label);
  if (it == label_to_id.end()) return std::nullopt;
  return it->second;
}

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

SnapshotData parse_snapshots(const std::string& path, bool undirected) {
  auto in = open_input(path);
  SnapshotData data;
  std::map<std::int64_t, std::set<Edge>> edges_by_t;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skippable(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 3)
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 3 tab-separated fields");
    const std::int64_t t = parse_int(fields[0], path, line_no);
    const std::int64_t src = parse_int(fields[1], path, line_no);
    const std::int64_t dst = parse_int(fields[2], path, line_no);
    if (t < 1)
      throw ParseError(path + ":" + std::to_string(line_no) + ": time step must be >= 1");
    if (src == dst)
      throw ParseError(path + ":" + std::to_string(line_no) + ": self-edge at node " + fields[1]);
    const int i = data.nodes.intern(src);
    const int j = data.nodes.intern(dst);
    edges_by_t[t].insert({i, j});
    if (undirected) edges_by_t[t].insert({j, i});
  }
  if (edges_by_t.empty()) throw ParseError(path + ": no snapshots found");

  const std::int64_t t_min = edges_by_t.begin()->first;
  const std::int64_t t_max = edges_by_t.rbegin()->first;
  data.t_shift = static_cast<int>(t_min - 1);
  const int n = data.nodes.size();
  for (std::int64_t t = t_min; t <= t_max; ++t) {
    const int tc = static_cast<int>(t - data.t_shift);
    const auto it = edges_by_t.find(t);
    if (it == edges_by_t.end()) {
      data.inserted_gaps.push_back(tc);
      data.snapshots.emplace_back(tc, n, std::vector<Edge>{}, undirected);
      std::cerr << "warning: " << path << ": no edges at time " << t
                << "; inserted empty snapshot\n";
    } else {
      data.snapshots.emplace_back(tc, n, std::vector<Edge>(it->second.begin(), it->second.end()),
                                  undirected);
    }
  }
  return data;
}

std::vector<int> parse_memberships(const std::string& path, NodeDict& nodes) {
  auto in = open_input(path);
  std::unordered_map<int, int> label_of;
  std::string line;
  int line_no = 0;
  int k = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skippable(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 2)
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 2 tab-separated fields");
    const std::int64_t node = parse_int(fields[0], path, line_no);
    const std::int64_t cls = parse_int(fields[1], path, line_no);
    if (cls < 1)
      throw ParseError(path + ":" + std::to_string(line_no) + ": classes are 1-based");
    const int id = nodes.intern(node);
    if (label_of.count(id))
      throw ParseError(path + ":" + std::to_string(line_no) + ": duplicate node " + fields[0]);
    label_of[id] = static_cast<int>(cls - 1);
    k = std::max(k, static_cast<int>(cls));
  }
  std::vector<int> labels(nodes.size(), -1);
  for (const auto& [id, c] : label_of) labels[id] = c;
  for (int i = 0; i < nodes.size(); ++i)
    if (labels[i] < 0)
      throw ParseError(path + ": node with label " + std::to_string(nodes.id_to_label[i]) +
                       " appears in snapshots but has no membership");
  return labels;
}

std::vector<std::vector<int>> parse_memberships_per_step(const std::string& path, NodeDict& nodes,
                                                         int n_steps) {
  auto in = open_input(path);
  std::vector<std::unordered_map<int, int>> per_step(n_steps);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skippable(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 3)
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 3 tab-separated fields");
    const std::int64_t t = parse_int(fields[0], path, line_no);
    const std::int64_t node = parse_int(fields[1], path, line_no);
    const std::int64_t cls = parse_int(fields[2], path, line_no);
    if (t < 1 || t > n_steps)
      throw ParseError(path + ":" + std::to_string(line_no) + ": time step out of range");
    if (cls < 1)
      throw ParseError(path + ":" + std::to_string(line_no) + ": classes are 1-based");
    per_step[t - 1][nodes.intern(node)] = static_cast<int>(cls - 1);
  }
  std::vector<std::vector<int>> labels(n_steps, std::vector<int>(nodes.size(), -1));
  for (int t = 0; t < n_steps; ++t) {
    for (const auto& [id, c] : per_step[t]) labels[t][id] = c;
    for (int i = 0; i < nodes.size(); ++i)
      if (labels[t][i] < 0)
        throw ParseError(path + ": node " + std::to_string(nodes.id_to_label[i]) +
                         " missing at time " + std::to_string(t + 1));
  }
  return labels;
}

void write_snapshots(const std::string& path, const std::vector<Snapshot>& snapshots,
                     const NodeDict* nodes) {
  auto out = open_output(path);
  out << "# t\tsrc\tdst\n";
  for (const auto& snap : snapshots) {
    for (const auto& [i, j] : snap.edges()) {
      const std::int64_t si = nodes ? nodes->id_to_label[i] : i;
      const std::int64_t sj = nodes ? nodes->id_to_label[j] : j;
      out << snap.t() << '\t' << si << '\t' << sj << '\n';
    }
  }
}

void write_node_map(const std::string& path, const NodeDict& nodes) {
  auto out = open_output(path);
  out << "# id\tlabel\n";
  for (int i = 0; i < nodes.size(); ++i) out << i << '\t' << nodes.id_to_label[i] << '\n';
}

void write_memberships_per_step(const std::string& path,
                                const std::vector<ClassAssignment>& classes,
                                const NodeDict* nodes) {
  auto out = open_output(path);
  out << "# t\tnode\tclass\n";
  for (std::size_t t = 0; t < classes.size(); ++t)
    for (int i = 0; i < classes[t].n_nodes(); ++i) {
      const std::int64_t label = nodes ? nodes->id_to_label[i] : i;
      out << (t + 1) << '\t' << label << '\t' << (classes[t].label(i) + 1) << '\n';
    }
}

std::vector<EstimateRecord> make_estimates(const FilterState& state) {
  const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(state.dim()))));
  std::vector<EstimateRecord> records;
  records.reserve(state.dim());
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      const int i = cell_index(a, b, k);
      const double sd = std::sqrt(std::max(state.cov(i, i), 0.0));
      EstimateRecord rec;
      rec.t = state.t;
      rec.a = a + 1;
      rec.b = b + 1;
      rec.theta_hat = logistic(state.mean[i]);
      rec.ci_low = logistic(state.mean[i] - 1.96 * sd);
      rec.ci_high = logistic(state.mean[i] + 1.96 * sd);
      rec.var_logit = state.cov(i, i);
      records.push_back(rec);
    }
  return records;
}

void write_estimates_csv(const std::string& path, const std::vector<EstimateRecord>& records) {
  auto out = open_output(path);
  out << "t,a,b,theta_hat,ci_low,ci_high,var_logit\n";
  for (const auto& r : records)
    out << r.t << ',' << r.a << ',' << r.b << ',' << format_real(r.theta_hat) << ','
        << format_real(r.ci_low) << ',' << format_real(r.ci_high) << ','
        << format_real(r.var_logit) << '\n';
}

std::vector<EstimateRecord> read_estimates_csv(const std::string& path) {
  auto in = open_input(path);
  std::vector<EstimateRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 || line.empty()) continue;  // header
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 7)
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 7 comma-separated fields");
    EstimateRecord r;
    r.t = static_cast<int>(parse_int(fields[0], path, line_no));
    r.a = static_cast<int>(parse_int(fields[1], path, line_no));
    r.b = static_cast<int>(parse_int(fields[2], path, line_no));
    r.theta_hat = parse_double(fields[3], path, line_no);
    r.ci_low = parse_double(fields[4], path, line_no);
    r.ci_high = parse_double(fields[5], path, line_no);
    r.var_logit = parse_double(fields[6], path, line_no);
    records.push_back(r);
  }
  return records;
}

void write_truth_psi_csv(const std::string& path, const GroundTruth& truth) {
  auto out = open_output(path);
  out << "t,a,b,psi,theta\n";
  for (std::size_t t = 0; t < truth.psi.size(); ++t) {
    const int k = static_cast<int>(truth.theta[t].rows());
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        const int i = cell_index(a, b, k);
        out << (t + 1) << ',' << (a + 1) << ',' << (b + 1) << ','
            << format_real(truth.psi[t][i]) << ',' << format_real(truth.theta[t](a, b)) << '\n';
      }
  }
}

void write_assignments_csv(const std::string& path, const std::vector<ClassAssignment>& classes,
                           const NodeDict* nodes) {
  auto out = open_output(path);
  out << "t,node,class\n";
  for (std::size_t t = 0; t < classes.size(); ++t)
    for (int i = 0; i < classes[t].n_nodes(); ++i) {
      const std::int64_t label = nodes ? nodes->id_to_label[i] : i;
      out << (t + 1) << ',' << label << ',' << (classes[t].label(i) + 1) << '\n';
    }
}

std::vector<std::vector<int>> read_assignments_csv(const std::string& path, NodeDict& nodes) {
  auto in = open_input(path);
  std::string line;
  int line_no = 0;
  std::vector<std::unordered_map<int, int>> per_step;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 || line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 3)
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 3 comma-separated fields");
    const int t = static_cast<int>(parse_int(fields[0], path, line_no));
    const std::int64_t node = parse_int(fields[1], path, line_no);
    const int cls = static_cast<int>(parse_int(fields[2], path, line_no));
    if (t < 1) throw ParseError(path + ":" + std::to_string(line_no) + ": time step must be >= 1");
    if (cls < 1) throw ParseError(path + ":" + std::to_string(line_no) + ": classes are 1-based");
    if (static_cast<int>(per_step.size()) < t) per_step.resize(t);
    per_step[t - 1][nodes.intern(node)] = cls - 1;
  }
  std::vector<std::vector<int>> labels(per_step.size(), std::vector<int>(nodes.size(), -1));
  for (std::size_t t = 0; t < per_step.size(); ++t) {
    for (const auto& [id, c] : per_step[t]) labels[t][id] = c;
    for (int i = 0; i < nodes.size(); ++i)
      if (labels[t][i] < 0)
        throw ParseError(path + ": node " + std::to_string(nodes.id_to_label[i]) +
                         " missing at time " + std::to_string(t + 1));
  }
  return labels;
}

std::vector<Vec> read_truth_psi_csv(const std::string& path, int k) {
  auto in = open_input(path);
  std::vector<Vec> psi;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 || line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < 4)
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected at least 4 fields");
    const int t = static_cast<int>(parse_int(fields[0], path, line_no));
    const int a = static_cast<int>(parse_int(fields[1], path, line_no));
    const int b = static_cast<int>(parse_int(fields[2], path, line_no));
    while (static_cast<int>(psi.size()) < t) psi.push_back(Vec::Zero(k * k));
    psi[t - 1][cell_index(a - 1, b - 1, k)] = parse_double(fields[3], path, line_no);
  }
  return psi;
}

}  // namespace dynsbm
