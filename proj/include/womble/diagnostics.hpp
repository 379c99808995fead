#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "womble/data.hpp"
#include "womble/sampler.hpp"

namespace womble {

struct WaicResult {
  double waic = 0.0;
  double lppd = 0.0;
  double p_waic = 0.0;  // variance-based penalty
};

/// WAIC from a draws x cells matrix of pointwise log likelihoods.
/// waic = -2 (lppd - p_waic); lower is better.
WaicResult waic(const Eigen::MatrixXd& pointwise);

/// Pointwise Poisson log likelihoods of retained draws, one column per
/// (region, disease) cell.
Eigen::MatrixXd pointwise_loglik(const PosteriorSamples& samples,
                                 const ObservedData& data);

struct EssResult {
  double ess = 0.0;
  Eigen::VectorXd mcse;        // per retained parameter, sqrt(Sigma_ii / B)
  std::vector<int> dropped;    // constant columns excluded from the ratio
  int batch_size = 0;
  int batches = 0;
};

/// Multivariate effective sample size B (|Lambda| / |Sigma|)^{1/p}, with
/// Sigma estimated by non-overlapping batch means at batch size floor(sqrt B).
EssResult multivariate_ess(const Eigen::MatrixXd& draws);

/// Minimum ESS needed for relative precision eps at confidence 1 - alpha,
/// and the precision implied by an achieved ESS (same relation inverted).
double min_ess(int p, double alpha, double eps);
double ess_precision(int p, double alpha, double ess);

/// Moran's I with binary weights over the given unordered pair set.
double morans_i(const Eigen::VectorXd& field,
                const std::vector<std::pair<int, int>>& pairs);

/// Sample Pearson correlations between columns.
Eigen::MatrixXd pearson_matrix(const Eigen::MatrixXd& columns);

}  // namespace womble
