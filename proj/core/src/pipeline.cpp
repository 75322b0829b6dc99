#include "dynsbm/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <mutex>
#include <cmath>
#include <thread>

#include "dynsbm/errors.hpp"
#include "dynsbm/evalmetrics.hpp"
#include "dynsbm/pforacle.hpp"
#include "dynsbm/rng.hpp"
#include "dynsbm/ssbm.hpp"

namespace dynsbm {

void parallel_runs(int runs, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, runs));
  if (workers == 1) {
    for (int r = 0; r < runs; ++r) fn(r);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const int r = next.fetch_add(1);
        if (r >= runs) break;
        try {
          fn(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

AprioriResult run_apriori(const std::vector<Snapshot>& snapshots,
                          const std::vector<ClassAssignment>& assignments,
                          const StateSpaceConfig& cfg) {
  if (snapshots.empty()) throw ConfigError("run_apriori: empty sequence");
  if (snapshots.size() != assignments.size())
    throw ConfigError("run_apriori: snapshots and assignments differ in length");

  AprioriResult result;
  result.stats.reserve(snapshots.size());
  for (std::size_t t = 0; t < snapshots.size(); ++t)
    result.stats.push_back(block_counts(snapshots[t], assignments[t]));

  result.states.push_back(diffuse_init(result.stats.front()));
  for (std::size_t t = 1; t < snapshots.size(); ++t) {
    FilterState pred = predict(result.states.back(), cfg);
    const Vec y = result.stats[t].clamped_density_vec();
    result.prediction_error += (y - logistic_vec(pred.mean)).squaredNorm();
    FilterState upd = update(pred, y, plugin_obs_cov(pred.mean, result.stats[t].n));
    result.predicted.push_back(std::move(pred));
    result.states.push_back(std::move(upd));
  }
  return result;
}

AposterioriResult run_aposteriori(const std::vector<Snapshot>& snapshots, int k,
                                  const StateSpaceConfig& cfg, const SearchConfig& search,
                                  std::uint64_t seed) {
  if (snapshots.empty()) throw ConfigError("run_aposteriori: empty sequence");
  AposterioriResult result;
  FitStepResult step = fit_initial(snapshots.front(), k, search, seed);
  result.states.push_back(step.state);
  result.assignments.push_back(step.assignment);
  result.scores.push_back(step.score);
  result.moves.push_back(step.iterations);
  for (std::size_t t = 1; t < snapshots.size(); ++t) {
    step = fit_step(snapshots[t], result.assignments.back(), result.states.back(), cfg, search);
    result.states.push_back(step.state);
    result.assignments.push_back(step.assignment);
    result.scores.push_back(step.score);
    result.moves.push_back(step.iterations);
  }
  return result;
}

PerStepSsbmResult run_per_step_ssbm(const std::vector<Snapshot>& snapshots, int k,
                                    std::uint64_t seed) {
  PerStepSsbmResult result;
  for (std::size_t t = 0; t < snapshots.size(); ++t) {
    ClassAssignment assignment = spectral_init(snapshots[t], k, derive_seed(seed, t));
    const BlockStats stats = block_counts(snapshots[t], assignment);
    result.psi.push_back(logit_vec(stats.clamped_density_vec()));
    result.assignments.push_back(std::move(assignment));
  }
  return result;
}

namespace {

double mean_ari(const std::vector<ClassAssignment>& est,
                const std::vector<ClassAssignment>& truth) {
  double total = 0.0;
  for (std::size_t t = 0; t < est.size(); ++t) total += adjusted_rand(est[t], truth[t]);
  return total / static_cast<double>(est.size());
}

/// MSE with a per-step alignment (for baselines whose labels are not
/// carried across steps).
double mse_aligned_per_step(const std::vector<Vec>& psi_est,
                            const std::vector<ClassAssignment>& est,
                            const GroundTruth& truth, int k) {
  double total = 0.0;
  for (std::size_t t = 0; t < psi_est.size(); ++t) {
    const auto perm = best_class_permutation({est[t].labels()}, {truth.classes[t].labels()}, k);
    total += (permute_state(psi_est[t], perm, k) - truth.psi[t]).squaredNorm();
  }
  return total / static_cast<double>(psi_est.size());
}

std::vector<double> collect(const std::vector<ReplicationRun>& runs,
                            double ReplicationRun::*field) {
  std::vector<double> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(r.*field);
  return out;
}

}  // namespace

ReplicateSummary replicate(const ReplicateParams& params) {
  ReplicateSummary summary;
  summary.runs.resize(params.runs);

  parallel_runs(params.runs, params.workers, [&](int r) {
    SimParams sim = params.sim;
    sim.seed = derive_seed(params.seed, static_cast<std::uint64_t>(r));
    const Simulation data = generate(sim);
    const int k = sim.k;
    const StateSpaceConfig cfg = StateSpaceConfig::random_walk(k, sim.s_diag, sim.s_nb);
    SearchConfig search;
    search.max_iter = params.max_iter;

    ReplicationRun& run = summary.runs[r];

    const auto t0 = std::chrono::steady_clock::now();
    const AposterioriResult apost =
        run_aposteriori(data.snapshots, k, cfg, search, derive_seed(sim.seed, 101));
    run.seconds_aposteriori =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const PerStepSsbmResult ssbm =
        run_per_step_ssbm(data.snapshots, k, derive_seed(sim.seed, 202));

    run.ari_ekf = mean_ari(apost.assignments, data.truth.classes);
    run.ari_ssbm = mean_ari(ssbm.assignments, data.truth.classes);
    run.mse_apost_ekf = tracking_mse_aligned(apost.states, apost.assignments, data.truth);
    run.mse_apost_ssbm = mse_aligned_per_step(ssbm.psi, ssbm.assignments, data.truth, k);

    const AprioriResult apriori = run_apriori(data.snapshots, data.truth.classes, cfg);
    run.mse_apriori_ekf = tracking_mse(apriori.states, data.truth);
    std::vector<Vec> ssbm_apriori;
    for (const auto& stats : apriori.stats)
      ssbm_apriori.push_back(logit_vec(stats.clamped_density_vec()));
    run.mse_apriori_ssbm = tracking_mse(ssbm_apriori, data.truth.psi);

    // covariance health across every filter state of the run
    double min_eig = std::numeric_limits<double>::infinity();
    double trace_scale = 0.0;
    auto scan_cov = [&](const FilterState& s) {
      Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (s.cov + s.cov.transpose()),
                                            Eigen::EigenvaluesOnly);
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
      trace_scale = std::max(trace_scale, s.cov.trace());
    };
    for (const auto& s : apost.states) scan_cov(s);
    for (const auto& s : apriori.states) scan_cov(s);
    for (const auto& s : apriori.predicted) scan_cov(s);
    run.min_cov_eigen = min_eig;
    run.cov_trace_scale = trace_scale;
  });

  summary.median_ari_ekf = median(collect(summary.runs, &ReplicationRun::ari_ekf));
  summary.median_ari_ssbm = median(collect(summary.runs, &ReplicationRun::ari_ssbm));
  summary.median_mse_apost_ekf = median(collect(summary.runs, &ReplicationRun::mse_apost_ekf));
  summary.median_mse_apost_ssbm = median(collect(summary.runs, &ReplicationRun::mse_apost_ssbm));
  summary.median_mse_apriori_ekf = median(collect(summary.runs, &ReplicationRun::mse_apriori_ekf));
  summary.median_mse_apriori_ssbm =
      median(collect(summary.runs, &ReplicationRun::mse_apriori_ssbm));
  int wins = 0;
  for (const auto& r : summary.runs)
    if (r.mse_apriori_ekf <= r.mse_apriori_ssbm) ++wins;
  summary.apriori_ekf_win_fraction = static_cast<double>(wins) / params.runs;
  return summary;
}

SweepSummary hyper_sweep(const ReplicateParams& params, const std::vector<double>& s_diag_grid,
                         const std::vector<double>& s_nb_grid) {
  // hold the sequences fixed across grid points
  std::vector<Simulation> data;
  data.reserve(params.runs);
  for (int r = 0; r < params.runs; ++r) {
    SimParams sim = params.sim;
    sim.seed = derive_seed(params.seed, static_cast<std::uint64_t>(r));
    data.push_back(generate(sim));
  }

  SweepSummary summary;
  for (double sd : s_diag_grid)
    for (double snb : s_nb_grid) {
      SweepPoint point;
      point.s_diag = sd;
      point.s_nb = snb;
      StateSpaceConfig cfg;
      try {
        cfg = StateSpaceConfig::random_walk(params.sim.k, sd, snb);
        point.valid = true;
      } catch (const ConfigError&) {
        point.valid = false;
        summary.points.push_back(point);
        continue;
      }
      std::vector<double> aris(params.runs);
      SearchConfig search;
      search.max_iter = params.max_iter;
      parallel_runs(params.runs, params.workers, [&](int r) {
        const AposterioriResult apost =
            run_aposteriori(data[r].snapshots, params.sim.k, cfg, search,
                            derive_seed(derive_seed(params.seed, r), 101));
        aris[r] = mean_ari(apost.assignments, data[r].truth.classes);
      });
      point.median_ari = median(aris);
      summary.points.push_back(point);
    }

  bool any = false;
  for (const auto& p : summary.points) {
    if (!p.valid) continue;
    if (!any) {
      summary.best_median_ari = summary.worst_median_ari = p.median_ari;
      any = true;
    } else {
      summary.best_median_ari = std::max(summary.best_median_ari, p.median_ari);
      summary.worst_median_ari = std::min(summary.worst_median_ari, p.median_ari);
    }
  }
  if (!any) throw ConfigError("hyper_sweep: no PSD-valid grid point");
  return summary;
}

DiagnoseSummary diagnose(const SimParams& sim_template, int runs, int n_particles,
                         std::uint64_t seed, int workers) {
  DiagnoseSummary summary;
  summary.runs.resize(runs);
  const int steps = sim_template.T - 1;  // diagnostics exist from t = 2
  if (steps < 1) throw ConfigError("diagnose: need at least 2 time steps");
  std::vector<std::vector<double>> term_eigs(steps), noise_vars(steps);

  std::mutex curves_mutex;
  parallel_runs(runs, workers, [&](int r) {
    SimParams sim = sim_template;
    sim.seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    const Simulation data = generate(sim);
    const StateSpaceConfig cfg = StateSpaceConfig::random_walk(sim.k, sim.s_diag, sim.s_nb);

    const AprioriResult ekf = run_apriori(data.snapshots, data.truth.classes, cfg);
    summary.runs[r].mse_ekf = tracking_mse(ekf.states, data.truth);

    const auto pf_g =
        pf_filter(ekf.stats, cfg, n_particles, ObsLikelihood::Gaussian, derive_seed(sim.seed, 7));
    const auto pf_b =
        pf_filter(ekf.stats, cfg, n_particles, ObsLikelihood::Binomial, derive_seed(sim.seed, 8));
    auto pf_mse = [&](const std::vector<PfEstimate>& est) {
      std::vector<Vec> means;
      for (const auto& e : est) means.push_back(e.mean);
      return tracking_mse(means, data.truth.psi);
    };
    summary.runs[r].mse_pf_gauss = pf_mse(pf_g);
    summary.runs[r].mse_pf_binom = pf_mse(pf_b);

    std::vector<SecondOrderDiagnostic> diags;
    for (std::size_t t = 0; t < ekf.predicted.size(); ++t) {
      const ObsNoise noise = plugin_obs_cov(ekf.predicted[t].mean, ekf.stats[t + 1].n);
      diags.push_back(second_order_diagnostic(ekf.predicted[t], noise));
    }
    std::lock_guard<std::mutex> lock(curves_mutex);
    for (std::size_t t = 0; t < diags.size(); ++t) {
      const auto& d = diags[t];
      for (Eigen::Index i = 0; i < d.term_eigenvalues.size(); ++i)
        term_eigs[t].push_back(d.term_eigenvalues[i]);
      for (Eigen::Index i = 0; i < d.obs_variances.size(); ++i)
        noise_vars[t].push_back(d.obs_variances[i]);
    }
  });

  std::vector<double> all_terms, all_noise;
  for (int t = 0; t < steps; ++t) {
    const auto ts = MetricReport::summarize(term_eigs[t]);
    const auto ns = MetricReport::summarize(noise_vars[t]);
    summary.term_min.push_back(ts.min);
    summary.term_median.push_back(ts.median);
    summary.term_max.push_back(ts.max);
    summary.noise_min.push_back(ns.min);
    summary.noise_median.push_back(ns.median);
    summary.noise_max.push_back(ns.max);
    all_terms.insert(all_terms.end(), term_eigs[t].begin(), term_eigs[t].end());
    all_noise.insert(all_noise.end(), noise_vars[t].begin(), noise_vars[t].end());
  }
  summary.pooled_term_median = median(all_terms);
  summary.pooled_noise_median = median(all_noise);

  std::vector<double> e, g, b;
  for (const auto& r : summary.runs) {
    e.push_back(r.mse_ekf);
    g.push_back(r.mse_pf_gauss);
    b.push_back(r.mse_pf_binom);
  }
  summary.median_mse_ekf = median(e);
  summary.median_mse_pf_gauss = median(g);
  summary.median_mse_pf_binom = median(b);
  return summary;
}

LinkPredictionRun predict_links(const std::vector<Snapshot>& snapshots,
                                const std::vector<FilterState>& states,
                                const std::vector<ClassAssignment>& assignments,
                                const std::vector<double>& lambda_grid,
                                const std::vector<double>& w_grid, double train_frac) {
  const int T = static_cast<int>(snapshots.size());
  if (T < 3) throw ConfigError("predict_links: need at least 3 time steps");
  if (lambda_grid.empty() || w_grid.empty()) throw ConfigError("predict_links: empty grid");
  const int n_targets = T - 1;  // targets 2..T predicted from the prefix
  int n_train = static_cast<int>(std::lround(train_frac * n_targets));
  n_train = std::max(1, std::min(n_train, n_targets - 1));

  // EWMA predictions per lambda; entry tau-2 predicts target tau
  std::vector<std::vector<ScoreMatrix>> ewma_by_lambda;
  for (double lambda : lambda_grid) {
    std::vector<ScoreMatrix> preds;
    for (int tau = 2; tau <= T; ++tau)
      preds.push_back(ewma_predict(
          std::vector<Snapshot>(snapshots.begin(), snapshots.begin() + (tau - 1)), lambda));
    ewma_by_lambda.push_back(std::move(preds));
  }
  std::vector<ScoreMatrix> block_preds;
  for (int tau = 2; tau <= T; ++tau)
    block_preds.push_back(block_predict(states[tau - 2], assignments[tau - 2]));

  auto truth_window = [&](int first_target, int count) {
    std::vector<Snapshot> window;
    for (int i = 0; i < count; ++i) window.push_back(snapshots[first_target - 1 + i]);
    return window;
  };
  auto scores_window = [&](int li, double w, int first_target, int count) {
    std::vector<ScoreMatrix> scores;
    for (int i = 0; i < count; ++i) {
      const int idx = first_target - 2 + i;
      scores.push_back(blend(block_preds[idx], ewma_by_lambda[li][idx], w));
    }
    return scores;
  };

  const auto train_truth = truth_window(2, n_train);
  const auto test_truth = truth_window(2 + n_train, n_targets - n_train);

  double best_auc = -1.0;
  int best_li = 0;
  double best_w = 0.0;
  double best_ew_auc = -1.0;
  int best_ew_li = 0;
  for (std::size_t li = 0; li < lambda_grid.size(); ++li) {
    const double ew = auc_micro(scores_window(static_cast<int>(li), 0.0, 2, n_train), train_truth);
    if (ew > best_ew_auc) {
      best_ew_auc = ew;
      best_ew_li = static_cast<int>(li);
    }
    for (double w : w_grid) {
      const double a = auc_micro(scores_window(static_cast<int>(li), w, 2, n_train), train_truth);
      if (a > best_auc) {
        best_auc = a;
        best_li = static_cast<int>(li);
        best_w = w;
      }
    }
  }

  LinkPredictionRun result;
  result.tuned.lambda = lambda_grid[best_li];
  result.tuned.w_block = best_w;
  result.lambda_ewma = lambda_grid[best_ew_li];
  for (int i = 0; i < n_targets - n_train; ++i) result.test_targets.push_back(2 + n_train + i);
  result.blend_scores = scores_window(best_li, best_w, 2 + n_train, n_targets - n_train);
  result.auc_blend = auc_micro(result.blend_scores, test_truth);
  result.auc_ewma =
      auc_micro(scores_window(best_ew_li, 0.0, 2 + n_train, n_targets - n_train), test_truth);
  return result;
}

LinkPredSummary linkpred_experiment(const SimParams& sim_template, int runs,
                                    const std::vector<double>& lambda_grid,
                                    const std::vector<double>& w_grid, double train_frac,
                                    std::uint64_t seed, int workers) {
  LinkPredSummary summary;
  summary.runs.resize(runs);
  parallel_runs(runs, workers, [&](int r) {
    SimParams sim = sim_template;
    sim.seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    const Simulation data = generate(sim);
    const StateSpaceConfig cfg = StateSpaceConfig::random_walk(sim.k, sim.s_diag, sim.s_nb);
    const AprioriResult apriori = run_apriori(data.snapshots, data.truth.classes, cfg);

    const LinkPredictionRun run = predict_links(data.snapshots, apriori.states,
                                                data.truth.classes, lambda_grid, w_grid,
                                                train_frac);
    summary.runs[r].auc_blend = run.auc_blend;
    summary.runs[r].auc_ewma = run.auc_ewma;
    summary.runs[r].lambda_blend = run.tuned.lambda;
    summary.runs[r].w_block = run.tuned.w_block;
    summary.runs[r].lambda_ewma = run.lambda_ewma;
  });

  std::vector<double> blends, ewmas;
  for (const auto& r : summary.runs) {
    blends.push_back(r.auc_blend);
    ewmas.push_back(r.auc_ewma);
    if (r.auc_blend > r.auc_ewma) ++summary.blend_strictly_better;
    if (r.auc_blend >= r.auc_ewma) ++summary.blend_at_least;
  }
  summary.median_auc_blend = median(blends);
  summary.median_auc_ewma = median(ewmas);
  return summary;
}

}  // namespace dynsbm
