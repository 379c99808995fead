#include "womble/spatial_dp.hpp"

#include <cmath>
#include <stdexcept>

namespace womble {

std::vector<double> weights_from_sticks(const std::vector<double>& sticks) {
  if (sticks.empty()) throw std::invalid_argument("weights_from_sticks: no sticks");
  const std::size_t k = sticks.size();
  for (std::size_t j = 0; j < k; ++j) {
    if (sticks[j] <= 0.0 || sticks[j] > 1.0) {
      throw std::invalid_argument("weights_from_sticks: sticks must lie in (0, 1]");
    }
  }
  if (sticks.back() != 1.0) {
    throw std::invalid_argument("weights_from_sticks: final stick must equal 1");
  }
  std::vector<double> weights(k);
  double remaining = 1.0;
  for (std::size_t j = 0; j < k; ++j) {
    weights[j] = sticks[j] * remaining;
    remaining *= 1.0 - sticks[j];
  }
  return weights;
}

int label_from_cdf(double cdf, const std::vector<double>& weights) {
  const int k = static_cast<int>(weights.size());
  double cum = 0.0;
  for (int j = 0; j < k; ++j) {
    cum += weights[j];
    if (cdf <= cum) return j;
  }
  return k - 1;  // cdf beyond the accumulated mass by rounding
}

int label_from_gamma(double gamma, double sd, const std::vector<double>& weights) {
  if (sd <= 0.0) throw std::invalid_argument("label_from_gamma: sd must be positive");
  return label_from_cdf(normal_cdf(gamma / sd), weights);
}

Eigen::VectorXd phi_from_state(const std::vector<int>& labels,
                               const Eigen::VectorXd& atoms) {
  Eigen::VectorXd phi(static_cast<int>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= atoms.size()) {
      throw std::out_of_range("phi_from_state: label out of range");
    }
    phi(static_cast<int>(i)) = atoms(labels[i]);
  }
  return phi;
}

PriorCovResult prior_cov_oracle(const GammaCovariance& cov, const DpPriors& priors,
                                std::pair<int, int> sites, int draws, Rng& rng) {
  if (priors.a_s <= 1.0) {
    throw std::invalid_argument("prior_cov_oracle: a_s must exceed 1 for a finite atom variance");
  }
  if (draws < 10000) {
    throw std::invalid_argument("prior_cov_oracle: need at least 10^4 draws");
  }
  const int k = priors.truncation;
  const double atom_var = priors.b_s / (priors.a_s - 1.0);
  const int si = sites.first;
  const int sj = sites.second;
  const double sd_i = cov.marginal_sd(si);
  const double sd_j = cov.marginal_sd(sj);

  std::vector<double> sticks(k);
  Eigen::VectorXd atoms(k);
  double sum_pi = 0.0, sum_pj = 0.0, sum_prod = 0.0;
  double sum_same = 0.0;
  double sum_diff = 0.0, sum_diff2 = 0.0;
  for (int t = 0; t < draws; ++t) {
    for (int j = 0; j + 1 < k; ++j) sticks[j] = rng.beta1(priors.alpha);
    sticks[k - 1] = 1.0;
    const auto weights = weights_from_sticks(sticks);

    const double tau = rng.gamma(priors.a_s, priors.b_s);
    const double atom_sd = 1.0 / std::sqrt(tau);
    for (int j = 0; j < k; ++j) atoms(j) = rng.normal(0.0, atom_sd);

    const Eigen::VectorXd gamma = cov.sample(rng);
    const int ui = label_from_cdf(normal_cdf(gamma(si) / sd_i), weights);
    const int uj = label_from_cdf(normal_cdf(gamma(sj) / sd_j), weights);

    const double prod = atoms(ui) * atoms(uj);
    const double same = (ui == uj) ? 1.0 : 0.0;
    sum_pi += atoms(ui);
    sum_pj += atoms(uj);
    sum_prod += prod;
    sum_same += same;
    const double diff = prod - atom_var * same;
    sum_diff += diff;
    sum_diff2 += diff * diff;
  }

  const double nd = static_cast<double>(draws);
  PriorCovResult out;
  out.mc_cov = sum_prod / nd - (sum_pi / nd) * (sum_pj / nd);
  out.tie_rate = sum_same / nd;
  out.semianalytic = atom_var * out.tie_rate;
  const double mean_diff = sum_diff / nd;
  out.diff_se = std::sqrt((sum_diff2 / nd - mean_diff * mean_diff) / nd);
  return out;
}

}  // namespace womble
