#include "womble/diagnostics.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <stdexcept>

namespace womble {

WaicResult waic(const Eigen::MatrixXd& pointwise) {
  const int draws = static_cast<int>(pointwise.rows());
  const int cells = static_cast<int>(pointwise.cols());
  if (draws < 2) throw std::invalid_argument("waic: need at least two draws");

  WaicResult out;
  for (int c = 0; c < cells; ++c) {
    const auto col = pointwise.col(c);
    // log mean exp, stabilized
    const double mx = col.maxCoeff();
    const double lme =
        mx + std::log((col.array() - mx).exp().sum() / static_cast<double>(draws));
    out.lppd += lme;
    const double mean = col.mean();
    out.p_waic += (col.array() - mean).square().sum() / (draws - 1.0);
  }
  out.waic = -2.0 * (out.lppd - out.p_waic);
  return out;
}

Eigen::MatrixXd pointwise_loglik(const PosteriorSamples& samples,
                                 const ObservedData& data) {
  const int n = data.n, q = data.q, p = data.p;
  const int draws = samples.kept;
  Eigen::MatrixXd out(draws, n * q);
  for (int t = 0; t < draws; ++t) {
    for (int d = 0; d < q; ++d) {
      for (int i = 0; i < n; ++i) {
        const int s = d * n + i;
        const double lin =
            data.design.row(s).dot(samples.beta.row(t).segment(d * p, p)) +
            samples.phi(t, s);
        const double e = data.expected(i, d);
        out(t, s) = data.y(i, d) * (std::log(e) + lin) - e * std::exp(lin) -
                    std::lgamma(data.y(i, d) + 1.0);
      }
    }
  }
  return out;
}

EssResult multivariate_ess(const Eigen::MatrixXd& draws) {
  const int b_total = static_cast<int>(draws.rows());
  if (b_total < 4) throw std::invalid_argument("multivariate_ess: too few draws");

  // drop constant columns; their sample covariance is singular
  EssResult out;
  std::vector<int> keep;
  for (int c = 0; c < draws.cols(); ++c) {
    const double spread =
        (draws.col(c).array() - draws.col(c).mean()).abs().maxCoeff();
    if (spread > 0.0) {
      keep.push_back(c);
    } else {
      out.dropped.push_back(c);
    }
  }
  const int p = static_cast<int>(keep.size());
  if (p == 0) throw std::invalid_argument("multivariate_ess: all parameters constant");
  if (b_total <= p) {
    throw std::invalid_argument("multivariate_ess: need more draws than parameters");
  }

  Eigen::MatrixXd x(b_total, p);
  for (int c = 0; c < p; ++c) x.col(c) = draws.col(keep[c]);
  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  const Eigen::MatrixXd lambda =
      centered.transpose() * centered / (static_cast<double>(b_total) - 1.0);

  const int batch = static_cast<int>(std::floor(std::sqrt(b_total)));
  const int a = b_total / batch;
  if (a < 2) throw std::invalid_argument("multivariate_ess: too few batches");
  Eigen::MatrixXd bm(a, p);
  for (int k = 0; k < a; ++k) {
    bm.row(k) = x.middleRows(k * batch, batch).colwise().mean();
  }
  const Eigen::RowVectorXd bmean = bm.colwise().mean();
  const Eigen::MatrixXd bc = bm.rowwise() - bmean;
  const Eigen::MatrixXd sigma =
      static_cast<double>(batch) * (bc.transpose() * bc) / (a - 1.0);

  const auto logdet = [](const Eigen::MatrixXd& m) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    double ld = 0.0;
    for (int i = 0; i < m.rows(); ++i) ld += std::log(std::abs(lu.matrixLU()(i, i)));
    return ld;
  };
  out.ess = b_total * std::exp((logdet(lambda) - logdet(sigma)) / p);
  out.mcse = (sigma.diagonal() / static_cast<double>(b_total)).array().sqrt();
  out.batch_size = batch;
  out.batches = a;
  return out;
}

double min_ess(int p, double alpha, double eps) {
  boost::math::chi_squared chi2(p);
  const double quant = boost::math::quantile(chi2, 1.0 - alpha);
  const double log_num = (2.0 / p) * std::log(2.0) + std::log(M_PI) +
                         std::log(quant) - 2.0 * std::log(eps);
  const double log_den =
      (2.0 / p) * (std::log(static_cast<double>(p)) + std::lgamma(p / 2.0));
  return std::exp(log_num - log_den);
}

double ess_precision(int p, double alpha, double ess) {
  // invert min_ess in eps: eps = sqrt(min_ess(p, alpha, 1) / ess)
  return std::sqrt(min_ess(p, alpha, 1.0) / ess);
}

double morans_i(const Eigen::VectorXd& field,
                const std::vector<std::pair<int, int>>& pairs) {
  const int n = static_cast<int>(field.size());
  if (pairs.empty()) throw std::invalid_argument("morans_i: empty pair set");
  const Eigen::VectorXd centered = field.array() - field.mean();
  const double denom = centered.squaredNorm();
  if (denom <= 0.0) throw std::invalid_argument("morans_i: zero-variance field");
  double cross = 0.0;
  for (auto [i, j] : pairs) cross += 2.0 * centered(i) * centered(j);
  const double s0 = 2.0 * static_cast<double>(pairs.size());
  return (static_cast<double>(n) / s0) * cross / denom;
}

Eigen::MatrixXd pearson_matrix(const Eigen::MatrixXd& columns) {
  const int q = static_cast<int>(columns.cols());
  const int n = static_cast<int>(columns.rows());
  Eigen::MatrixXd centered = columns.rowwise() - columns.colwise().mean();
  Eigen::VectorXd norms(q);
  for (int c = 0; c < q; ++c) {
    norms(c) = centered.col(c).norm();
    if (norms(c) <= 0.0) {
      throw std::invalid_argument("pearson_matrix: zero-variance column");
    }
  }
  Eigen::MatrixXd corr(q, q);
  for (int a = 0; a < q; ++a) {
    for (int b = 0; b < q; ++b) {
      corr(a, b) = centered.col(a).dot(centered.col(b)) / (norms(a) * norms(b));
    }
  }
  (void)n;
  return corr;
}

}  // namespace womble
