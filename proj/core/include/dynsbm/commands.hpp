#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dynsbm {

/// Parameters of one CLI invocation. Commands: simulate, fit, tune,
/// predict, eval, diagnose, replicate.
struct RunConfig {
  std::string command;

  std::string input;         // snapshot TSV
  std::string memberships;   // node<TAB>class or t<TAB>node<TAB>class
  std::string estimates;     // estimates CSV (eval)
  std::string assignments;   // per-step assignment TSV (eval, a posteriori)
  std::string truth_psi;     // truth CSV (eval)
  std::string truth_classes; // truth membership TSV (eval)
  std::string out_dir;       // falls back to $DYNSBM_OUT, then "."

  int k = 4;
  std::string mode = "apriori";  // apriori | aposteriori
  double s_diag = 0.01;
  double s_nb = 0.0025;
  std::vector<double> s_diag_grid;
  std::vector<double> s_nb_grid;
  std::vector<double> lambda_grid;
  std::vector<double> w_block_grid;
  double lambda = -1.0;   // >= 0 fixes the EWMA decay
  double w_block = -1.0;  // >= 0 fixes the blend weight
  double train_frac = 0.7;

  std::uint64_t seed = 1;
  int runs = 50;
  int particles = 10000;
  bool undirected = false;
  bool sweep = false;  // replicate: hyperparameter sensitivity sweep
  int workers = 1;
  int max_iter = 400;

  // simulation parameters (simulate / replicate / diagnose)
  int n_nodes = 128;
  int T = 10;
  double churn = 0.10;
  double theta_diag = 0.2580;
  double theta_offdiag = 0.0834;
  double gamma0 = 0.04;

  std::string resolved_out_dir() const;
};

/// Execute one command; returns a process exit status and writes result
/// files plus a manifest under the output directory.
int run(const RunConfig& config);

}  // namespace dynsbm
