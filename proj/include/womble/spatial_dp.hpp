#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "womble/disease_cov.hpp"
#include "womble/rng.hpp"

namespace womble {

/// Stick-breaking weights p_1 = V_1, p_j = V_j prod_{k<j}(1 - V_k).
/// Requires each V_k in (0,1] and V_K = 1 so that the weights close to 1.
std::vector<double> weights_from_sticks(const std::vector<double>& sticks);

/// Cell index (0-based) whose cumulative-weight interval contains `cdf`.
/// A value equal to a cumulative sum belongs to the lower cell.
int label_from_cdf(double cdf, const std::vector<double>& weights);

/// Label for a latent Gaussian coordinate: the cell containing
/// Phi(gamma / sd).
int label_from_gamma(double gamma, double sd, const std::vector<double>& weights);

/// phi_i = theta[u_i].
Eigen::VectorXd phi_from_state(const std::vector<int>& labels,
                               const Eigen::VectorXd& atoms);

struct DpPriors {
  double a_s = 2.0;   // atom precision shape
  double b_s = 1.0;   // atom precision scale
  double alpha = 1.0; // DP concentration
  int truncation = 15;
};

/// Monte Carlo check of the marginal covariance law of two spatial effects.
/// Both estimates come from the same prior draws of (V, gamma, tau_s, theta):
/// `mc_cov` is the direct sample covariance of (phi_i, phi_j) while
/// `semianalytic` is (b_s/(a_s-1)) sum_k pihat_kk with pihat_kk the observed
/// frequency of both CDF values landing in cell k. `diff_se` is the paired
/// standard error of their difference.
struct PriorCovResult {
  double mc_cov = 0.0;
  double semianalytic = 0.0;
  double diff_se = 0.0;
  double tie_rate = 0.0;
};

PriorCovResult prior_cov_oracle(const GammaCovariance& cov, const DpPriors& priors,
                                std::pair<int, int> sites, int draws, Rng& rng);

}  // namespace womble
