#include "dynsbm/pforacle.hpp"

#include <cmath>
#include <random>

#include "dynsbm/errors.hpp"

namespace dynsbm {

namespace {

Mat psd_factor(const Mat& m) {
  Eigen::LLT<Mat> llt(m);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  const double tol = -1e-12 * std::max(1.0, m.trace());
  if (es.eigenvalues().minCoeff() < tol) throw ConfigError("particle filter: covariance not PSD");
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

}  // namespace

BootstrapFilter::BootstrapFilter(const StateSpaceConfig& cfg, int n_particles, std::uint64_t seed)
    : cfg_(cfg), walk_factor_(psd_factor(cfg.process_cov)), rng_(seed) {
  if (n_particles < 2) throw ConfigError("particle filter: need at least 2 particles");
  ensemble_.particles = Mat::Zero(n_particles, cfg.dim());
  ensemble_.weights = Vec::Constant(n_particles, 1.0 / static_cast<double>(n_particles));
  ensemble_.t = 0;
}

void BootstrapFilter::init_gaussian(const Vec& mean, const Mat& cov) {
  const Mat factor = psd_factor(cov);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = ensemble_.particles.rows();
  const auto d = ensemble_.particles.cols();
  Vec z(d);
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index i = 0; i < d; ++i) z[i] = normal(rng_);
    ensemble_.particles.row(p) = (mean + factor * z).transpose();
  }
  ensemble_.weights.setConstant(1.0 / static_cast<double>(n));
}

void BootstrapFilter::init_diagonal(const Vec& mean, const Vec& var) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = ensemble_.particles.rows();
  const auto d = ensemble_.particles.cols();
  for (Eigen::Index p = 0; p < n; ++p)
    for (Eigen::Index i = 0; i < d; ++i)
      ensemble_.particles(p, i) = mean[i] + std::sqrt(var[i]) * normal(rng_);
  ensemble_.weights.setConstant(1.0 / static_cast<double>(n));
}

void BootstrapFilter::step(const LogLikFn& loglik) {
  const auto n = ensemble_.particles.rows();
  const auto d = ensemble_.particles.cols();

  // propagate through psi <- F psi + v
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec z(d);
  for (Eigen::Index p = 0; p < n; ++p) {
    Vec x = cfg_.transition * ensemble_.particles.row(p).transpose();
    for (Eigen::Index i = 0; i < d; ++i) z[i] = normal(rng_);
    ensemble_.particles.row(p) = (x + walk_factor_ * z).transpose();
  }

  Vec log_weights(n);
  loglik(ensemble_.particles, log_weights);
  for (Eigen::Index p = 0; p < n; ++p) {
    if (std::isnan(log_weights[p])) throw NumericalError("particle filter: NaN log-weight");
    log_weights[p] += std::log(ensemble_.weights[p]);
  }
  normalize_and_maybe_resample(log_weights);
  ++ensemble_.t;
}

void BootstrapFilter::normalize_and_maybe_resample(const Vec& log_weights) {
  const auto n = log_weights.size();
  const double max_lw = log_weights.maxCoeff();
  if (!std::isfinite(max_lw))
    throw NumericalError("particle filter: all particle weights underflowed");
  Vec w = (log_weights.array() - max_lw).exp();
  const double total = w.sum();
  if (!(total > 0.0)) throw NumericalError("particle filter: degenerate weights");
  w /= total;
  ensemble_.weights = w;

  if (effective_sample_size() < 0.5 * static_cast<double>(n)) {
    // systematic resampling
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double offset = unif(rng_) / static_cast<double>(n);
    Mat resampled(n, ensemble_.particles.cols());
    double cum = ensemble_.weights[0];
    Eigen::Index j = 0;
    for (Eigen::Index p = 0; p < n; ++p) {
      const double u = offset + static_cast<double>(p) / static_cast<double>(n);
      while (cum < u && j + 1 < n) cum += ensemble_.weights[++j];
      resampled.row(p) = ensemble_.particles.row(j);
    }
    ensemble_.particles = std::move(resampled);
    ensemble_.weights.setConstant(1.0 / static_cast<double>(n));
  }
}

Vec BootstrapFilter::mean() const {
  return ensemble_.particles.transpose() * ensemble_.weights;
}

Mat BootstrapFilter::covariance() const {
  const Vec mu = mean();
  const auto n = ensemble_.particles.rows();
  Mat cov = Mat::Zero(mu.size(), mu.size());
  for (Eigen::Index p = 0; p < n; ++p) {
    const Vec d = ensemble_.particles.row(p).transpose() - mu;
    cov += ensemble_.weights[p] * d * d.transpose();
  }
  return cov;
}

double BootstrapFilter::effective_sample_size() const {
  return 1.0 / ensemble_.weights.squaredNorm();
}

std::vector<PfEstimate> pf_filter(const std::vector<BlockStats>& observations,
                                  const StateSpaceConfig& cfg, int n_particles,
                                  ObsLikelihood likelihood, std::uint64_t seed) {
  if (observations.empty()) throw ConfigError("pf_filter: empty observation sequence");
  BootstrapFilter filter(cfg, n_particles, seed);
  std::vector<PfEstimate> estimates;
  estimates.reserve(observations.size());

  auto make_loglik = [&](const BlockStats& stats) -> BootstrapFilter::LogLikFn {
    const Vec y = stats.clamped_density_vec();
    const Vec m = stats.m_vec();
    const Vec n = stats.n_vec();
    if (likelihood == ObsLikelihood::Gaussian) {
      return [y, n](const Mat& particles, Vec& lw) {
        lw.setZero(particles.rows());
        for (Eigen::Index p = 0; p < particles.rows(); ++p) {
          double acc = 0.0;
          for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double theta = logistic(particles(p, i));
            const double s2 =
                std::max(theta * (1.0 - theta) / n[i], 1.0 / (4.0 * n[i] * n[i]));
            const double r = y[i] - theta;
            acc += -0.5 * (r * r / s2 + std::log(s2));
          }
          lw[p] = acc;
        }
      };
    }
    return [m, n](const Mat& particles, Vec& lw) {
      lw.setZero(particles.rows());
      for (Eigen::Index p = 0; p < particles.rows(); ++p) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < m.size(); ++i) {
          const double psi = particles(p, i);
          // m log h + (n - m) log(1-h) via softplus, binomial coefficient dropped
          const double sp_pos = psi > 0.0 ? psi + std::log1p(std::exp(-psi)) : std::log1p(std::exp(psi));
          const double sp_neg = sp_pos - psi;
          acc -= m[i] * sp_neg + (n[i] - m[i]) * sp_pos;
        }
        lw[p] = acc;
      }
    };
  };

  std::size_t start = 0;
  if (cfg.diffuse_init) {
    // same diffuse start as the EKF: cloud drawn from the transformed
    // first observation
    const FilterState init = diffuse_init(observations.front());
    filter.init_diagonal(init.mean, init.cov.diagonal());
    estimates.push_back({filter.mean(), filter.covariance()});
    start = 1;
  } else {
    filter.init_gaussian(cfg.init_mean, cfg.init_cov);
  }

  for (std::size_t t = start; t < observations.size(); ++t) {
    filter.step(make_loglik(observations[t]));
    estimates.push_back({filter.mean(), filter.covariance()});
  }
  return estimates;
}

}  // namespace dynsbm
