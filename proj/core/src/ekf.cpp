#include "dynsbm/ekf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dynsbm/errors.hpp"

namespace dynsbm {

namespace {

void require_symmetric_dim(const Mat& m, int dim, const char* what) {
  if (m.rows() != dim || m.cols() != dim)
    throw ConfigError(std::string(what) + ": expected " + std::to_string(dim) + "x" +
                      std::to_string(dim) + " matrix");
}

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

/// Cholesky with a single jitter retry of 1e-10 * trace / dim.
Eigen::LLT<Mat> cholesky_with_jitter(const Mat& m, const char* what) {
  Eigen::LLT<Mat> llt(m);
  if (llt.info() == Eigen::Success) return llt;
  const double jitter = 1e-10 * m.trace() / static_cast<double>(m.rows());
  Mat jittered = m + jitter * Mat::Identity(m.rows(), m.cols());
  llt.compute(jittered);
  if (llt.info() != Eigen::Success)
    throw NumericalError(std::string(what) + ": not positive definite after jitter " +
                         std::to_string(jitter) + " (trace " + std::to_string(m.trace()) + ")");
  return llt;
}

double median_of_sorted(const Vec& v) {
  const auto n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Vec logistic_vec(const Vec& x) {
  Vec out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = logistic(x[i]);
  return out;
}

double logit(double y) {
  if (!(y > 0.0 && y < 1.0))
    throw ConfigError("logit: argument " + std::to_string(y) + " outside (0,1)");
  return std::log(y) - std::log1p(-y);
}

Vec logit_vec(const Vec& y) {
  Vec out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) out[i] = logit(y[i]);
  return out;
}

StateSpaceConfig StateSpaceConfig::random_walk(int k, double s_diag, double s_nb) {
  const int kk = k * k;
  StateSpaceConfig cfg;
  cfg.transition = Mat::Identity(kk, kk);
  cfg.process_cov = build_process_cov(k, s_diag, s_nb);
  cfg.init_mean = Vec::Zero(kk);
  cfg.init_cov = Mat::Zero(kk, kk);
  cfg.diffuse_init = true;
  return cfg;
}

FilterState predict(const FilterState& state, const StateSpaceConfig& cfg) {
  if (state.phase != Phase::Updated) throw ConfigError("predict: state is not in updated phase");
  const int d = state.dim();
  require_symmetric_dim(cfg.transition, d, "predict: transition");
  require_symmetric_dim(cfg.process_cov, d, "predict: process covariance");

  FilterState out;
  out.mean = cfg.transition * state.mean;
  out.cov = symmetrize(cfg.transition * state.cov * cfg.transition.transpose() + cfg.process_cov);
  out.t = state.t + 1;
  out.phase = Phase::Predicted;
  return out;
}

Vec jacobian_h(const Vec& psi_pred) {
  Vec out(psi_pred.size());
  for (Eigen::Index i = 0; i < psi_pred.size(); ++i) {
    const double h = logistic(psi_pred[i]);
    out[i] = h * (1.0 - h);
  }
  return out;
}

void kalman_update(const Vec& pred_mean, const Mat& pred_cov, const Vec& y, const Vec& obs_pred,
                   const Vec& h_jac, const Vec& obs_var, Vec& upd_mean, Mat& upd_cov) {
  const auto d = pred_mean.size();
  if (y.size() != d || obs_pred.size() != d || h_jac.size() != d || obs_var.size() != d ||
      pred_cov.rows() != d || pred_cov.cols() != d)
    throw ConfigError("kalman_update: dimension mismatch");

  // S = H R H^T + Sigma, with diagonal H
  Mat innov_cov = h_jac.asDiagonal() * pred_cov * h_jac.asDiagonal();
  innov_cov.diagonal() += obs_var;
  const auto llt = cholesky_with_jitter(innov_cov, "kalman_update: innovation covariance");

  // K = R H^T S^{-1}
  const Mat rht = pred_cov * h_jac.asDiagonal();
  const Mat gain = llt.solve(rht.transpose()).transpose();

  upd_mean = pred_mean + gain * (y - obs_pred);

  // Joseph form: (I - K H) R (I - K H)^T + K Sigma K^T
  const Mat ikh = Mat::Identity(d, d) - gain * h_jac.asDiagonal();
  upd_cov = symmetrize(ikh * pred_cov * ikh.transpose() +
                       gain * obs_var.asDiagonal() * gain.transpose());
}

FilterState update(const FilterState& state, const Vec& y, const ObsNoise& noise) {
  if (state.phase != Phase::Predicted) throw ConfigError("update: state is not in predicted phase");
  FilterState out;
  out.t = state.t;
  out.phase = Phase::Updated;
  kalman_update(state.mean, state.cov, y, logistic_vec(state.mean), jacobian_h(state.mean),
                noise.var, out.mean, out.cov);
  return out;
}

FilterState diffuse_init(const BlockStats& y1) {
  const Vec y = y1.clamped_density_vec();
  const Vec n = y1.n_vec();
  FilterState out;
  out.t = 1;
  out.phase = Phase::Updated;
  out.mean = logit_vec(y);
  Vec var(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double gprime = 1.0 / y[i] + 1.0 / (1.0 - y[i]);
    const double s2 = std::max(y[i] * (1.0 - y[i]) / n[i], 1.0 / (4.0 * n[i] * n[i]));
    var[i] = gprime * gprime * s2;
  }
  out.cov = var.asDiagonal();
  return out;
}

ObsNoise plugin_obs_cov(const Vec& psi_pred, const Vec& n_counts) {
  if (psi_pred.size() != n_counts.size()) throw ConfigError("plugin_obs_cov: dimension mismatch");
  Vec var(psi_pred.size());
  for (Eigen::Index i = 0; i < psi_pred.size(); ++i) {
    const double n = n_counts[i];
    if (n < 1.0) throw ConfigError("plugin_obs_cov: block with no possible edges");
    const double theta = logistic(psi_pred[i]);
    var[i] = std::max(theta * (1.0 - theta) / n, 1.0 / (4.0 * n * n));
  }
  return ObsNoise{std::move(var)};
}

ObsNoise plugin_obs_cov(const Vec& psi_pred, const CountMat& n) {
  return plugin_obs_cov(psi_pred, stack_columns(n.cast<double>()));
}

Mat build_process_cov(int k, double s_diag, double s_nb) {
  const int kk = k * k;
  Mat gamma(kk, kk);
  for (int i = 0; i < kk; ++i) {
    auto [ai, bi] = cell_of(i, k);
    for (int j = 0; j < kk; ++j) {
      auto [aj, bj] = cell_of(j, k);
      if (i == j)
        gamma(i, j) = s_diag;
      else if (ai == aj || bi == bj)
        gamma(i, j) = s_nb;
      else
        gamma(i, j) = 0.0;
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(gamma, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  const double tol = -1e-12 * std::max(1.0, gamma.trace());
  if (min_eig < tol)
    throw ConfigError("process covariance not PSD: smallest eigenvalue " +
                      std::to_string(min_eig) + " for s_diag=" + std::to_string(s_diag) +
                      ", s_nb=" + std::to_string(s_nb));
  return gamma;
}

double SecondOrderDiagnostic::term_min() const { return term_eigenvalues.minCoeff(); }
double SecondOrderDiagnostic::term_median() const { return median_of_sorted(term_eigenvalues); }
double SecondOrderDiagnostic::term_max() const { return term_eigenvalues.maxCoeff(); }
double SecondOrderDiagnostic::noise_min() const { return obs_variances.minCoeff(); }
double SecondOrderDiagnostic::noise_median() const { return median_of_sorted(obs_variances); }
double SecondOrderDiagnostic::noise_max() const { return obs_variances.maxCoeff(); }

SecondOrderDiagnostic second_order_diagnostic(const FilterState& predicted,
                                              const ObsNoise& noise) {
  if (predicted.phase != Phase::Predicted)
    throw ConfigError("second_order_diagnostic: state is not in predicted phase");
  const auto d = predicted.dim();
  // Second derivative of the logistic: h''(x) = h (1-h) (1-2h).
  Vec c(d);
  for (int i = 0; i < d; ++i) {
    const double h = logistic(predicted.mean[i]);
    c[i] = h * (1.0 - h) * (1.0 - 2.0 * h);
  }
  const Vec r_diag = predicted.cov.diagonal();
  Mat term(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double rij = predicted.cov(i, j);
      term(i, j) = c[i] * c[j] * (0.25 * r_diag[i] * r_diag[j] + 0.5 * rij * rij);
    }
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(term), Eigen::EigenvaluesOnly);

  SecondOrderDiagnostic diag;
  diag.term_eigenvalues = es.eigenvalues();
  Vec sigma = noise.var;
  std::sort(sigma.data(), sigma.data() + sigma.size());
  diag.obs_variances = std::move(sigma);
  return diag;
}

double prediction_error(const std::vector<BlockStats>& stats, const StateSpaceConfig& cfg) {
  if (stats.size() < 2) throw ConfigError("prediction_error: need at least 2 time steps");
  FilterState state = diffuse_init(stats.front());
  double err = 0.0;
  for (std::size_t t = 1; t < stats.size(); ++t) {
    const FilterState pred = predict(state, cfg);
    const Vec y = stats[t].clamped_density_vec();
    err += (y - logistic_vec(pred.mean)).squaredNorm();
    state = update(pred, y, plugin_obs_cov(pred.mean, stats[t].n));
  }
  return err;
}

HyperGridPoint fit_hyperparams(const std::vector<Snapshot>& snapshots,
                               const std::vector<ClassAssignment>& assignments,
                               const std::vector<HyperGridPoint>& grid) {
  if (snapshots.size() < 3) throw ConfigError("fit_hyperparams: need at least 3 time steps");
  if (snapshots.size() != assignments.size())
    throw ConfigError("fit_hyperparams: snapshots and assignments differ in length");
  if (grid.empty()) throw ConfigError("fit_hyperparams: empty grid");

  std::vector<BlockStats> stats;
  stats.reserve(snapshots.size());
  for (std::size_t t = 0; t < snapshots.size(); ++t)
    stats.push_back(block_counts(snapshots[t], assignments[t]));
  const int k = assignments.front().k();

  bool found = false;
  HyperGridPoint best;
  double best_err = 0.0;
  for (const auto& point : grid) {
    StateSpaceConfig cfg;
    try {
      cfg = StateSpaceConfig::random_walk(k, point.s_diag, point.s_nb);
    } catch (const ConfigError&) {
      continue;  // non-PSD grid point
    }
    const double err = prediction_error(stats, cfg);
    const bool better =
        !found || err < best_err ||
        (err == best_err && (point.s_diag < best.s_diag ||
                             (point.s_diag == best.s_diag && point.s_nb < best.s_nb)));
    if (better) {
      found = true;
      best = point;
      best_err = err;
    }
  }
  if (!found) throw ConfigError("fit_hyperparams: no PSD-valid grid point");
  return best;
}

}  // namespace dynsbm
