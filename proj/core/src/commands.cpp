#include "dynsbm/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "dynsbm/errors.hpp"
#include "dynsbm/evalmetrics.hpp"
#include "dynsbm/io.hpp"
#include "dynsbm/pforacle.hpp"
#include "dynsbm/pipeline.hpp"
#include "dynsbm/rng.hpp"
#include "dynsbm/ssbm.hpp"
#include "dynsbm/version.hpp"

namespace dynsbm {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json flat_config(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["input"] = c.input;
  j["memberships"] = c.memberships;
  j["estimates"] = c.estimates;
  j["assignments"] = c.assignments;
  j["truth_psi"] = c.truth_psi;
  j["truth_classes"] = c.truth_classes;
  j["out"] = c.resolved_out_dir();
  j["k"] = c.k;
  j["mode"] = c.mode;
  j["s_diag"] = c.s_diag;
  j["s_nb"] = c.s_nb;
  j["s_diag_grid"] = c.s_diag_grid;
  j["s_nb_grid"] = c.s_nb_grid;
  j["lambda_grid"] = c.lambda_grid;
  j["w_block_grid"] = c.w_block_grid;
  j["lambda"] = c.lambda;
  j["w_block"] = c.w_block;
  j["train_frac"] = c.train_frac;
  j["seed"] = c.seed;
  j["runs"] = c.runs;
  j["particles"] = c.particles;
  j["undirected"] = c.undirected;
  j["sweep"] = c.sweep;
  j["workers"] = c.workers;
  j["max_iter"] = c.max_iter;
  j["n_nodes"] = c.n_nodes;
  j["T"] = c.T;
  j["churn"] = c.churn;
  j["theta_diag"] = c.theta_diag;
  j["theta_offdiag"] = c.theta_offdiag;
  j["gamma0"] = c.gamma0;
  return j;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError(path.string() + ": cannot open for writing");
  out << j.dump(2) << '\n';
}

void write_manifest(const RunConfig& c, const fs::path& dir) {
  json j;
  j["version"] = kVersion;
  j["config"] = flat_config(c);
  write_json(dir / "manifest.json", j);
}

SimParams sim_params(const RunConfig& c) {
  SimParams p;
  p.n_nodes = c.n_nodes;
  p.k = c.k;
  p.theta_diag_mean = c.theta_diag;
  p.theta_offdiag_mean = c.theta_offdiag;
  p.gamma0_scale = c.gamma0;
  p.s_diag = c.s_diag;
  p.s_nb = c.s_nb;
  p.churn_fraction = c.churn;
  p.T = c.T;
  p.directed = !c.undirected;
  p.seed = c.seed;
  return p;
}

std::vector<double> default_log_grid(double center) {
  // 5 points per axis, two decades total span
  return {center * 0.1, center * 0.31622776601683794, center, center * 3.1622776601683795,
          center * 10.0};
}

/// Memberships file, static (2 columns) or per-step (3 columns).
std::vector<std::vector<int>> load_memberships(const std::string& path, NodeDict& nodes,
                                               int n_steps) {
  std::ifstream probe(path);
  if (!probe) throw ParseError(path + ": cannot open for reading");
  std::string line;
  int tabs = -1;
  while (std::getline(probe, line)) {
    if (line.empty() || line[0] == '#') continue;
    tabs = static_cast<int>(std::count(line.begin(), line.end(), '\t'));
    break;
  }
  if (tabs == 1) {
    const auto labels = parse_memberships(path, nodes);
    return std::vector<std::vector<int>>(n_steps, labels);
  }
  if (tabs == 2) return parse_memberships_per_step(path, nodes, n_steps);
  throw ParseError(path + ": expected 2 or 3 tab-separated columns");
}

int infer_k(const std::vector<std::vector<int>>& labels) {
  int k = 0;
  for (const auto& step : labels)
    for (int c : step) k = std::max(k, c + 1);
  return k;
}

/// Re-synthesize snapshots on the dictionary universe (memberships can
/// extend it past the nodes seen in edges).
std::vector<Snapshot> with_universe(const std::vector<Snapshot>& snapshots, int n) {
  std::vector<Snapshot> out;
  out.reserve(snapshots.size());
  for (const auto& s : snapshots) out.emplace_back(s.t(), n, s.edges(), s.undirected());
  return out;
}

int command_simulate(const RunConfig& c, const fs::path& dir) {
  const Simulation sim = generate(sim_params(c));
  write_snapshots((dir / "snapshots.tsv").string(), sim.snapshots);
  write_truth_psi_csv((dir / "truth_psi.csv").string(), sim.truth);
  write_memberships_per_step((dir / "truth_classes.tsv").string(), sim.truth.classes);
  std::cout << "simulate: wrote " << sim.snapshots.size() << " snapshots over "
            << c.n_nodes << " nodes to " << dir.string() << "\n";
  return 0;
}

int command_fit(const RunConfig& c, const fs::path& dir) {
  if (c.input.empty()) throw ConfigError("fit: --input is required");
  SnapshotData data = parse_snapshots(c.input, c.undirected);

  std::vector<EstimateRecord> records;
  if (c.mode == "apriori") {
    if (c.memberships.empty()) throw ConfigError("fit: a priori mode requires --memberships");
    const auto labels =
        load_memberships(c.memberships, data.nodes, static_cast<int>(data.snapshots.size()));
    const int k = infer_k(labels);
    const auto snapshots = with_universe(data.snapshots, data.nodes.size());
    std::vector<ClassAssignment> assignments;
    for (const auto& step : labels) assignments.emplace_back(step, k);
    const StateSpaceConfig cfg = StateSpaceConfig::random_walk(k, c.s_diag, c.s_nb);
    const AprioriResult result = run_apriori(snapshots, assignments, cfg);
    for (const auto& state : result.states) {
      const auto recs = make_estimates(state);
      records.insert(records.end(), recs.begin(), recs.end());
    }
  } else if (c.mode == "aposteriori") {
    if (!c.memberships.empty())
      throw ConfigError("fit: a posteriori mode estimates memberships; drop --memberships");
    const StateSpaceConfig cfg = StateSpaceConfig::random_walk(c.k, c.s_diag, c.s_nb);
    SearchConfig search;
    search.max_iter = c.max_iter;
    search.parallel = c.workers > 1;
    search.n_threads = c.workers;
    const AposterioriResult result =
        run_aposteriori(data.snapshots, c.k, cfg, search, c.seed);
    for (const auto& state : result.states) {
      const auto recs = make_estimates(state);
      records.insert(records.end(), recs.begin(), recs.end());
    }
    write_assignments_csv((dir / "assignments.csv").string(), result.assignments, &data.nodes);
  } else {
    throw ConfigError("fit: unknown mode '" + c.mode + "'");
  }
  write_estimates_csv((dir / "estimates.csv").string(), records);
  write_node_map((dir / "node_map.tsv").string(), data.nodes);
  std::cout << "fit: wrote " << records.size() << " estimates to " << dir.string() << "\n";
  return 0;
}

int command_tune(const RunConfig& c, const fs::path& dir) {
  if (c.input.empty() || c.memberships.empty())
    throw ConfigError("tune: --input and --memberships are required");
  SnapshotData data = parse_snapshots(c.input, c.undirected);
  const auto labels =
      load_memberships(c.memberships, data.nodes, static_cast<int>(data.snapshots.size()));
  const int k = infer_k(labels);
  const auto snapshots = with_universe(data.snapshots, data.nodes.size());
  std::vector<ClassAssignment> assignments;
  for (const auto& step : labels) assignments.emplace_back(step, k);

  const auto sd_grid = c.s_diag_grid.empty() ? default_log_grid(c.s_diag) : c.s_diag_grid;
  const auto snb_grid = c.s_nb_grid.empty() ? default_log_grid(c.s_nb) : c.s_nb_grid;
  std::vector<HyperGridPoint> grid;
  for (double sd : sd_grid)
    for (double snb : snb_grid) grid.push_back({sd, snb});
  const HyperGridPoint best = fit_hyperparams(snapshots, assignments, grid);

  json j;
  j["version"] = kVersion;
  j["s_diag"] = best.s_diag;
  j["s_nb"] = best.s_nb;
  j["s_diag_grid"] = sd_grid;
  j["s_nb_grid"] = snb_grid;
  write_json(dir / "tune_report.json", j);
  std::cout << "tune: selected s_diag=" << best.s_diag << " s_nb=" << best.s_nb << "\n";
  return 0;
}

int command_predict(const RunConfig& c, const fs::path& dir) {
  if (c.input.empty()) throw ConfigError("predict: --input is required");
  SnapshotData data = parse_snapshots(c.input, c.undirected);

  std::vector<FilterState> states;
  std::vector<ClassAssignment> assignments;
  if (c.mode == "apriori") {
    if (c.memberships.empty()) throw ConfigError("predict: a priori mode requires --memberships");
    const auto labels =
        load_memberships(c.memberships, data.nodes, static_cast<int>(data.snapshots.size()));
    const int k = infer_k(labels);
    const auto snapshots = with_universe(data.snapshots, data.nodes.size());
    for (const auto& step : labels) assignments.emplace_back(step, k);
    const StateSpaceConfig cfg = StateSpaceConfig::random_walk(k, c.s_diag, c.s_nb);
    states = run_apriori(snapshots, assignments, cfg).states;
    data.snapshots = snapshots;
  } else {
    const StateSpaceConfig cfg = StateSpaceConfig::random_walk(c.k, c.s_diag, c.s_nb);
    SearchConfig search;
    search.max_iter = c.max_iter;
    const AposterioriResult result =
        run_aposteriori(data.snapshots, c.k, cfg, search, c.seed);
    states = result.states;
    assignments = result.assignments;
  }

  const auto lg = c.lambda >= 0.0 ? std::vector<double>{c.lambda}
                  : c.lambda_grid.empty() ? std::vector<double>{0.0, 0.25, 0.5, 0.75, 0.9}
                                          : c.lambda_grid;
  const auto wg = c.w_block >= 0.0 ? std::vector<double>{c.w_block}
                  : c.w_block_grid.empty() ? std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}
                                           : c.w_block_grid;
  const LinkPredictionRun result =
      predict_links(data.snapshots, states, assignments, lg, wg, c.train_frac);

  std::ofstream scores(dir / "scores.csv");
  scores << "t,src,dst,score\n";
  for (std::size_t w = 0; w < result.test_targets.size(); ++w) {
    const int t = result.test_targets[w];
    const Mat& s = result.blend_scores[w].values;
    for (int i = 0; i < s.rows(); ++i)
      for (int jj = 0; jj < s.cols(); ++jj) {
        if (i == jj) continue;
        scores << t << ',' << data.nodes.id_to_label[i] << ',' << data.nodes.id_to_label[jj]
               << ',' << format_real(s(i, jj)) << '\n';
      }
  }

  json j;
  j["version"] = kVersion;
  j["auc_blend"] = result.auc_blend;
  j["auc_ewma"] = result.auc_ewma;
  j["lambda"] = result.tuned.lambda;
  j["w_block"] = result.tuned.w_block;
  j["lambda_ewma"] = result.lambda_ewma;
  j["test_targets"] = result.test_targets;
  write_json(dir / "auc_report.json", j);
  std::cout << "predict: AUC blend=" << result.auc_blend << " ewma=" << result.auc_ewma << "\n";
  return 0;
}

int command_eval(const RunConfig& c, const fs::path& dir) {
  if (c.estimates.empty() || c.truth_psi.empty())
    throw ConfigError("eval: --estimates and --truth-psi are required");
  const auto records = read_estimates_csv(c.estimates);
  int k = 0, T = 0;
  for (const auto& r : records) {
    k = std::max(k, std::max(r.a, r.b));
    T = std::max(T, r.t);
  }
  if (k == 0) throw ConfigError("eval: empty estimates file");
  std::vector<Vec> psi_est(T, Vec::Zero(k * k));
  for (const auto& r : records)
    psi_est[r.t - 1][cell_index(r.a - 1, r.b - 1, k)] = logit(r.theta_hat);
  const auto truth_psi = read_truth_psi_csv(c.truth_psi, k);
  if (static_cast<int>(truth_psi.size()) != T)
    throw ConfigError("eval: estimates and truth differ in length");

  json j;
  j["version"] = kVersion;
  j["mse"] = tracking_mse(psi_est, truth_psi);

  if (!c.assignments.empty() && !c.truth_classes.empty()) {
    NodeDict dict;
    const auto est_labels = read_assignments_csv(c.assignments, dict);
    auto truth_labels = parse_memberships_per_step(c.truth_classes, dict, T);
    // score on the assignment's node universe; the truth file may cover
    // extra nodes that never appeared in any edge
    for (int t = 0; t < T; ++t) truth_labels[t].resize(est_labels[t].size());
    std::vector<double> ari;
    for (int t = 0; t < T; ++t) ari.push_back(adjusted_rand(est_labels[t], truth_labels[t]));
    double mean = 0.0;
    for (double a : ari) mean += a;
    j["ari_per_step"] = ari;
    j["ari_mean"] = mean / T;
    j["mse_aligned"] = tracking_mse_aligned(psi_est, est_labels, truth_labels, truth_psi, k);
  }
  write_json(dir / "eval_report.json", j);
  std::cout << "eval: mse=" << j["mse"] << "\n";
  return 0;
}

int command_diagnose(const RunConfig& c, const fs::path& dir) {
  const DiagnoseSummary summary =
      diagnose(sim_params(c), c.runs, c.particles, c.seed, c.workers);
  json j;
  j["version"] = kVersion;
  j["median_mse_ekf"] = summary.median_mse_ekf;
  j["median_mse_pf_gauss"] = summary.median_mse_pf_gauss;
  j["median_mse_pf_binom"] = summary.median_mse_pf_binom;
  j["mse_ratio_ekf_pf_gauss"] = summary.median_mse_ekf / summary.median_mse_pf_gauss;
  j["mse_ratio_ekf_pf_binom"] = summary.median_mse_ekf / summary.median_mse_pf_binom;
  j["mse_ratio_pf_gauss_pf_binom"] =
      summary.median_mse_pf_gauss / summary.median_mse_pf_binom;
  j["second_order"] = {
      {"term_min", summary.term_min},       {"term_median", summary.term_median},
      {"term_max", summary.term_max},       {"noise_min", summary.noise_min},
      {"noise_median", summary.noise_median}, {"noise_max", summary.noise_max},
      {"pooled_term_median", summary.pooled_term_median},
      {"pooled_noise_median", summary.pooled_noise_median}};
  json runs = json::array();
  for (const auto& r : summary.runs)
    runs.push_back({{"mse_ekf", r.mse_ekf},
                    {"mse_pf_gauss", r.mse_pf_gauss},
                    {"mse_pf_binom", r.mse_pf_binom}});
  j["runs"] = runs;
  write_json(dir / "diagnose_report.json", j);
  std::cout << "diagnose: median MSE ekf=" << summary.median_mse_ekf
            << " pf_gauss=" << summary.median_mse_pf_gauss
            << " pf_binom=" << summary.median_mse_pf_binom << "\n";
  return 0;
}

int command_replicate(const RunConfig& c, const fs::path& dir) {
  ReplicateParams params;
  params.sim = sim_params(c);
  params.runs = c.runs;
  params.max_iter = c.max_iter;
  params.workers = c.workers;
  params.seed = c.seed;

  json j;
  j["version"] = kVersion;
  if (c.sweep) {
    const auto sd_grid = c.s_diag_grid.empty() ? default_log_grid(c.s_diag) : c.s_diag_grid;
    const auto snb_grid = c.s_nb_grid.empty() ? default_log_grid(c.s_nb) : c.s_nb_grid;
    const SweepSummary sweep = hyper_sweep(params, sd_grid, snb_grid);
    json points = json::array();
    for (const auto& p : sweep.points)
      points.push_back({{"s_diag", p.s_diag},
                        {"s_nb", p.s_nb},
                        {"valid", p.valid},
                        {"median_ari", p.valid ? json(p.median_ari) : json()}});
    j["sweep"] = {{"points", points},
                  {"best_median_ari", sweep.best_median_ari},
                  {"worst_median_ari", sweep.worst_median_ari},
                  {"spread", sweep.best_median_ari - sweep.worst_median_ari}};
    write_json(dir / "replicate_summary.json", j);
    std::cout << "replicate --sweep: median ARI in [" << sweep.worst_median_ari << ", "
              << sweep.best_median_ari << "]\n";
    return 0;
  }

  const ReplicateSummary summary = replicate(params);
  j["median"] = {{"ari_aposteriori_ekf", summary.median_ari_ekf},
                 {"ari_perstep_ssbm", summary.median_ari_ssbm},
                 {"mse_aposteriori_ekf", summary.median_mse_apost_ekf},
                 {"mse_aposteriori_ssbm", summary.median_mse_apost_ssbm},
                 {"mse_apriori_ekf", summary.median_mse_apriori_ekf},
                 {"mse_apriori_ssbm", summary.median_mse_apriori_ssbm}};
  j["ari_gap"] = summary.median_ari_ekf - summary.median_ari_ssbm;
  j["apriori_ekf_win_fraction"] = summary.apriori_ekf_win_fraction;
  json runs = json::array();
  for (const auto& r : summary.runs)
    runs.push_back({{"ari_ekf", r.ari_ekf},
                    {"ari_ssbm", r.ari_ssbm},
                    {"mse_apost_ekf", r.mse_apost_ekf},
                    {"mse_apost_ssbm", r.mse_apost_ssbm},
                    {"mse_apriori_ekf", r.mse_apriori_ekf},
                    {"mse_apriori_ssbm", r.mse_apriori_ssbm},
                    {"min_cov_eigen", r.min_cov_eigen}});
  j["runs"] = runs;
  write_json(dir / "replicate_summary.json", j);

  // wall-clock timings are not reproducible, so they live outside the
  // deterministic summary
  json timing;
  json per_run = json::array();
  for (const auto& r : summary.runs) per_run.push_back(r.seconds_aposteriori);
  timing["seconds_aposteriori_per_run"] = per_run;
  write_json(dir / "timings.json", timing);
  std::cout << "replicate: median ARI ekf=" << summary.median_ari_ekf
            << " ssbm=" << summary.median_ari_ssbm << " (gap " << j["ari_gap"] << ")\n";
  return 0;
}

}  // namespace

std::string RunConfig::resolved_out_dir() const {
  if (!out_dir.empty()) return out_dir;
  if (const char* env = std::getenv("DYNSBM_OUT")) return env;
  return ".";
}

int run(const RunConfig& config) {
  try {
    const fs::path dir(config.resolved_out_dir());
    fs::create_directories(dir);
    write_manifest(config, dir);
    if (config.command == "simulate") return command_simulate(config, dir);
    if (config.command == "fit") return command_fit(config, dir);
    if (config.command == "tune") return command_tune(config, dir);
    if (config.command == "predict") return command_predict(config, dir);
    if (config.command == "eval") return command_eval(config, dir);
    if (config.command == "diagnose") return command_diagnose(config, dir);
    if (config.command == "replicate") return command_replicate(config, dir);
    std::cerr << "error: unknown command '" << config.command << "'\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error (" << config.command << "): " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dynsbm
