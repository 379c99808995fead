#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "womble/data.hpp"
#include "womble/disease_cov.hpp"
#include "womble/region_graph.hpp"
#include "womble/rng.hpp"
#include "womble/spatial_dp.hpp"

namespace womble {

struct PriorSpec {
  double sigma2_beta = 1.0;
  double a_s = 2.0;       // shape of the atom precision prior
  double b_s = 1.0;       // scale of the atom precision prior
  double dp_alpha = 1.0;  // stick-breaking concentration
  /// Upper bound M_r of each disparity coefficient, per disease. Empty means
  /// derive from the data as -log(0.5) / median(z column).
  std::vector<Eigen::VectorXd> eta_max;
  double wishart_nu = 2.0;
  Eigen::MatrixXd wishart_psi;  // default 0.1 I, set by defaults()
  double alpha_mean = 0.0;      // directed-pair prior mean
  double alpha_var = 100.0;     // directed-pair prior variance

  static PriorSpec defaults(int q);
};

struct ChainConfig {
  int iterations = 5000;
  int burnin = 2500;
  int thin = 1;
  int truncation = 15;  // K
  std::uint64_t seed = 1;
  /// Initial proposal standard deviations per block.
  double step_beta = 0.1;
  double step_theta = 0.1;
  double step_v = 0.5;
  double step_gamma = 0.1;  // fixed, never adapted
  double step_rho = 0.5;
  double step_eta = 0.5;
  double step_a = 0.05;     // fixed, never adapted
  double step_rho_dis = 0.5;
  double target_scalar = 0.44;
  double target_multivariate = 0.234;
  double adapt_decay = 0.7;
  bool no_likelihood = false;  // mask all counts (prior simulation)

  int retained() const { return (iterations - burnin) / thin; }
};

struct AcceptanceLog {
  std::map<std::string, long> proposed;
  std::map<std::string, long> accepted;
  long nonfinite_rejections = 0;
  double rate(const std::string& block) const;
};

struct PosteriorSamples {
  int n = 0, q = 0, p = 0, truncation = 0, kept = 0;
  DiseaseVariant variant = DiseaseVariant::unstructured;
  Eigen::MatrixXd beta;   // kept x (q*p)
  Eigen::MatrixXd theta;  // kept x K
  Eigen::VectorXd tau_s;  // kept
  Eigen::MatrixXd sticks; // kept x K
  Eigen::MatrixXd gamma;  // kept x N
  Eigen::MatrixXd rho;    // kept x q
  Eigen::MatrixXd eta;    // kept x (sum_d R_d)
  Eigen::MatrixXd cross;  // kept x cross-dimension (variant dependent)
  Eigen::MatrixXd phi;    // kept x N
  std::vector<std::vector<int>> labels;  // kept x N, 0-based
  std::vector<std::string> cross_names;
  std::vector<int> eta_offsets;  // start of each disease's eta block
  AcceptanceLog accept;
  std::map<std::string, double> final_steps;
};

/// Blocked Gibbs sampler with adaptive random-walk Metropolis steps.
/// One instance runs one chain; steps are public so tests can drive and
/// audit individual blocks.
class Sampler {
 public:
  Sampler(const ObservedData& data, const RegionGraph& graph,
          const DiseaseGraphSpec& disease, const PriorSpec& priors,
          const ChainConfig& config);

  struct StepResult {
    bool accepted = false;
    double log_ratio = 0.0;       // before min(0, .)
    Eigen::VectorXd proposal;     // proposed block on its sampling scale
  };

  StepResult step_beta();
  StepResult step_theta();
  std::vector<StepResult> step_gamma();
  StepResult step_sticks();
  void step_tau();
  StepResult step_rho();
  StepResult step_eta();
  /// Unstructured and undirected run a Metropolis update; directed draws the
  /// coefficient pairs exactly from their Gaussian full conditional (the
  /// result is then flagged accepted with log_ratio 0).
  StepResult step_cross();

  /// One full pass over steps 1-8, with adaptation while `iter` < burn-in.
  void iterate(int iter);

  PosteriorSamples run();

  // State access for tests and post-processing.
  const Eigen::VectorXd& beta() const { return beta_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  double tau() const { return tau_s_; }
  const std::vector<double>& sticks() const { return sticks_; }
  const std::vector<double>& weights() const { return weights_; }
  const Eigen::VectorXd& gamma() const { return gamma_; }
  const Eigen::VectorXd& rho() const { return rho_; }
  const Eigen::VectorXd& eta() const { return eta_; }
  const CrossDiseaseParams& cross() const { return cross_; }
  const std::vector<int>& labels() const { return labels_; }
  const Eigen::VectorXd& phi() const { return phi_; }
  const Eigen::VectorXd& cdf() const { return cdf_; }
  const GammaCovariance& covariance() const { return cov_; }
  const std::vector<Eigen::VectorXd>& eta_bounds() const { return eta_max_; }
  double step_scale(const std::string& block) const;
  const AcceptanceLog& acceptance() const { return accept_; }

  void set_gamma(const Eigen::VectorXd& gamma);
  void set_rho(const Eigen::VectorXd& rho);
  void set_cross(const CrossDiseaseParams& params);

  /// Poisson log likelihood at the current state (0 when masked).
  double log_likelihood() const;

 private:
  friend struct SamplerTestAccess;

  double site_loglik(int site, double atom) const;
  double total_loglik(const Eigen::VectorXd& lin_pred,
                      const Eigen::VectorXd& phi) const;
  std::vector<DagarPrecision> build_dagars(const Eigen::VectorXd& rho,
                                           const Eigen::VectorXd& eta) const;
  GammaCovariance build_cov(DagarList dagars) const;
  GammaCovariance build_cov(DagarList dagars, const CrossDiseaseParams& cross) const;
  /// Install a new covariance and refresh every gamma-derived cache
  /// (precision products, CDF values, labels, spatial effects).
  void install_cov(GammaCovariance cov);
  void refresh_labels();
  void adapt(const std::string& block, double log_ratio, int iter, double target);
  double log_prior_a(const Eigen::MatrixXd& a) const;
  void record(PosteriorSamples& out, int row) const;

  const ObservedData& data_;
  const RegionGraph& graph_;
  DiseaseGraphSpec disease_;
  PriorSpec priors_;
  ChainConfig config_;
  Rng rng_;

  int n_, q_, p_, big_n_, k_;
  Eigen::SparseMatrix<double> geo_adjacency_;
  std::vector<Eigen::VectorXd> eta_max_;
  std::vector<int> eta_offsets_;
  int eta_dim_ = 0;

  // parameters
  Eigen::VectorXd beta_;   // q*p, disease-major
  Eigen::VectorXd theta_;  // K
  double tau_s_ = 1.0;
  std::vector<double> sticks_;  // K, last pinned at 1
  Eigen::VectorXd gamma_;  // N
  Eigen::VectorXd rho_;    // q
  Eigen::VectorXd eta_;    // stacked per disease
  CrossDiseaseParams cross_;

  // caches
  GammaCovariance cov_;
  Eigen::VectorXd precision_gamma_;  // P * gamma
  double quad_ = 0.0;                // gamma' P gamma
  Eigen::VectorXd lin_pred_;         // X beta per site
  Eigen::VectorXd cdf_;              // Phi(gamma_s / sd_s)
  std::vector<double> weights_;      // stick-breaking weights
  std::vector<int> labels_;          // 0-based
  Eigen::VectorXd phi_;

  std::map<std::string, double> log_scale_;  // adaptation state
  AcceptanceLog accept_;
};

PosteriorSamples run_chain(const ObservedData& data, const RegionGraph& graph,
                           const DiseaseGraphSpec& disease, const PriorSpec& priors,
                           const ChainConfig& config);

/// Poisson log likelihood sum_{s} y_s (log E_s + x_s'b + phi_s)
///                        - E_s exp(x_s'b + phi_s) - log(y_s!).
double poisson_loglik(const ObservedData& data, const Eigen::VectorXd& beta,
                      const Eigen::VectorXd& phi);

}  // namespace womble
