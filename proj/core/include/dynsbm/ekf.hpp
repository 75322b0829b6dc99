#pragma once

#include <vector>

#include "dynsbm/graph.hpp"
#include "dynsbm/types.hpp"

namespace dynsbm {

enum class Phase { Predicted, Updated };

/// Filter state on the logit scale: mean of length k^2 (column stacked)
/// and full k^2 x k^2 covariance.
struct FilterState {
  Vec mean;
  Mat cov;
  int t = 1;
  Phase phase = Phase::Updated;

  int dim() const { return static_cast<int>(mean.size()); }
};

/// Linear-Gaussian state evolution: psi_t = F psi_{t-1} + v_t,
/// v_t ~ N(0, process_cov), psi_0 ~ N(init_mean, init_cov).
/// With diffuse_init the explicit prior is ignored and the filter is
/// started from the transformed first observation.
struct StateSpaceConfig {
  Mat transition;
  Mat process_cov;
  Vec init_mean;
  Mat init_cov;
  bool diffuse_init = true;

  int dim() const { return static_cast<int>(transition.rows()); }

  /// Identity transition, neighbor-structured process covariance,
  /// diffuse initialization.
  static StateSpaceConfig random_walk(int k, double s_diag, double s_nb);
};

/// Diagonal observation noise (variance per coordinate).
struct ObsNoise {
  Vec var;
};

/// Elementwise logistic, underflow-safe (never returns exactly 0 or 1
/// for finite double inputs above roughly -745).
double logistic(double x);
Vec logistic_vec(const Vec& x);

/// Elementwise logit; throws ConfigError on boundary values.
double logit(double y);
Vec logit_vec(const Vec& y);

/// psi_{t|t-1} = F psi_{t-1|t-1},  R_{t|t-1} = F R F^T + Gamma.
FilterState predict(const FilterState& state, const StateSpaceConfig& cfg);

/// Diagonal of the Jacobian of the elementwise logistic at psi_pred;
/// entries h'(x) = h(x)(1 - h(x)) in (0, 1/4].
Vec jacobian_h(const Vec& psi_pred);

/// Kalman measurement update for an observation y = obs_pred +
/// H (psi - pred_mean) + noise with diagonal H = diag(h_jac). The
/// innovation solve uses a Cholesky factorization (jittered once on
/// failure); the covariance uses the Joseph form, which equals
/// (I - K H) R at the optimal gain but stays symmetric PSD.
void kalman_update(const Vec& pred_mean, const Mat& pred_cov, const Vec& y, const Vec& obs_pred,
                   const Vec& h_jac, const Vec& obs_var, Vec& upd_mean, Mat& upd_cov);

/// EKF measurement update with the logistic observation map.
FilterState update(const FilterState& state, const Vec& y, const ObsNoise& noise);

/// Diffuse-prior start at t = 1: mean is the logit of the clamped first
/// densities; covariance is diagonal with entries (g'(y))^2 sigma^2 where
/// sigma^2 is the plug-in observation variance at theta = y.
FilterState diffuse_init(const BlockStats& y1);

/// Plug-in observation variances theta (1 - theta) / n at
/// theta = logistic(psi_pred), floored at 1/(4 n^2).
ObsNoise plugin_obs_cov(const Vec& psi_pred, const Vec& n_counts);
ObsNoise plugin_obs_cov(const Vec& psi_pred, const CountMat& n);

/// Process covariance with s_diag on the diagonal and s_nb between cells
/// sharing a row or column of the underlying k x k matrix. Throws
/// ConfigError (naming the offending eigenvalue) if not PSD.
Mat build_process_cov(int k, double s_diag, double s_nb);

/// Eigenvalues of the second-order observation-expansion term (bias +
/// variance) against the observation noise variances. The term for the
/// elementwise logistic reduces to
///   M_ij = 1/4 c_i c_j R_ii R_jj + 1/2 c_i c_j R_ij^2,
/// with c_i the second derivative of the logistic at the predicted state.
struct SecondOrderDiagnostic {
  Vec term_eigenvalues;  // ascending
  Vec obs_variances;     // ascending

  double term_min() const;
  double term_median() const;
  double term_max() const;
  double noise_min() const;
  double noise_median() const;
  double noise_max() const;
};

SecondOrderDiagnostic second_order_diagnostic(const FilterState& predicted,
                                              const ObsNoise& noise);

struct HyperGridPoint {
  double s_diag = 0.0;
  double s_nb = 0.0;
};

/// Select (s_diag, s_nb) from a grid by minimizing the one-step-ahead
/// squared prediction error of a full filter pass (F = identity, diffuse
/// start), summed over t >= 2. Ties break toward smaller s_diag, then
/// smaller s_nb. Grid points with a non-PSD covariance are skipped; if
/// none is valid a ConfigError is thrown.
HyperGridPoint fit_hyperparams(const std::vector<Snapshot>& snapshots,
                               const std::vector<ClassAssignment>& assignments,
                               const std::vector<HyperGridPoint>& grid);

/// Prediction error for a single hyperparameter choice (the objective
/// fit_hyperparams minimizes).
double prediction_error(const std::vector<BlockStats>& stats, const StateSpaceConfig& cfg);

}  // namespace dynsbm
