#pragma once

// Shared helpers for the test suites: dense oracles built directly from the
// formulas, independent of the library's sparse assembly paths.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "womble/dagar.hpp"
#include "womble/disease_cov.hpp"
#include "womble/region_graph.hpp"
#include "womble/rng.hpp"

namespace womble::test {

inline RegionGraph random_graph(Rng& rng, int n, double edge_prob,
                                bool shuffle_order = true) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.uniform() < edge_prob) edges.emplace_back(i, j);
    }
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (shuffle_order) {
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.uniform() * (i + 1));
      std::swap(order[i], order[std::min(j, i)]);
    }
  }
  return RegionGraph(n, std::move(edges), std::move(order));
}

/// Randomly thin the preceding-neighbor links, keeping each with probability
/// `keep_prob`.
inline PrecAdjacency random_adjacency(Rng& rng, const RegionGraph& g,
                                      double keep_prob) {
  PrecAdjacency w;
  w.n = g.size();
  w.kept.resize(w.n);
  for (int i = 0; i < w.n; ++i) {
    for (int j : g.preceding_neighbors(i)) {
      if (rng.uniform() < keep_prob) w.kept[i].push_back(j);
    }
  }
  return w;
}

/// (I-B)' Lambda (I-B) assembled with dense matrix products.
inline Eigen::MatrixXd dense_dagar(const PrecAdjacency& w, double rho) {
  const int n = w.n;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double deg = static_cast<double>(w.kept[i].size());
    const double denom = 1.0 + (deg - 1.0) * rho * rho;
    for (int j : w.kept[i]) b(i, j) = rho / denom;
    lambda(i, i) = denom / (1.0 - rho * rho);
  }
  const Eigen::MatrixXd imb = Eigen::MatrixXd::Identity(n, n) - b;
  return imb.transpose() * lambda * imb;
}

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Eigen::MatrixXd block_diag(const std::vector<Eigen::MatrixXd>& blocks) {
  int dim = 0;
  for (const auto& m : blocks) dim += static_cast<int>(m.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  int at = 0;
  for (const auto& m : blocks) {
    out.block(at, at, m.rows(), m.cols()) = m;
    at += static_cast<int>(m.rows());
  }
  return out;
}

inline Eigen::MatrixXd dense_sigma_unstructured(
    const Eigen::MatrixXd& a, const std::vector<Eigen::MatrixXd>& q_dense) {
  const int n = static_cast<int>(q_dense[0].rows());
  std::vector<Eigen::MatrixXd> inv;
  for (const auto& q : q_dense) inv.push_back(q.inverse());
  const Eigen::MatrixXd aki = kron(a, Eigen::MatrixXd::Identity(n, n));
  return aki * block_diag(inv) * aki.transpose();
}

inline Eigen::MatrixXd dense_sigma_directed(
    const DiseaseGraphSpec& spec, const std::vector<std::vector<double>>& a0,
    const std::vector<std::vector<double>>& a1, const Eigen::MatrixXd& geo,
    const std::vector<Eigen::MatrixXd>& q_dense) {
  const int n = static_cast<int>(q_dense[0].rows());
  const int nq = n * spec.q;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nq, nq);
  for (int d = 0; d < spec.q; ++d) {
    for (std::size_t k = 0; k < spec.parents[d].size(); ++k) {
      const int h = spec.parents[d][k];
      a.block(d * n, h * n, n, n) =
          a0[d][k] * Eigen::MatrixXd::Identity(n, n) + a1[d][k] * geo;
    }
  }
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(nq, nq) - a;
  std::vector<Eigen::MatrixXd> inv;
  for (const auto& q : q_dense) inv.push_back(q.inverse());
  const Eigen::MatrixXd minv = m.inverse();
  return minv * block_diag(inv) * minv.transpose();
}

inline Eigen::MatrixXd dense_precision_undirected(
    double rho_dis, const DiseaseGraphSpec& spec,
    const std::vector<Eigen::MatrixXd>& q_dense) {
  const int n = static_cast<int>(q_dense[0].rows());
  const Eigen::MatrixXd lambda =
      Eigen::MatrixXd(spec.degrees().asDiagonal()) - rho_dis * spec.w_dis;
  std::vector<Eigen::MatrixXd> r(spec.q);
  for (int d = 0; d < spec.q; ++d) {
    const Eigen::LLT<Eigen::MatrixXd> llt(q_dense[d]);
    r[d] = Eigen::MatrixXd(llt.matrixU()) / std::sqrt(lambda(d, d));
  }
  Eigen::MatrixXd prec = Eigen::MatrixXd::Zero(n * spec.q, n * spec.q);
  for (int d = 0; d < spec.q; ++d) {
    for (int h = 0; h < spec.q; ++h) {
      if (lambda(d, h) == 0.0) continue;
      prec.block(d * n, h * n, n, n) = lambda(d, h) * r[d].transpose() * r[h];
    }
  }
  return prec;
}

inline double max_rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(1e-30, std::max(a.cwiseAbs().maxCoeff(),
                                                b.cwiseAbs().maxCoeff()));
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

/// Kolmogorov-Smirnov distance between a sample and a reference CDF.
inline double ks_distance(std::vector<double> sample,
                          const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
  }
  return d;
}

inline double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

inline double sd_of(const std::vector<double>& xs) {
  const double m = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / (static_cast<double>(xs.size()) - 1.0));
}

/// Batch-means standard error of a chain mean.
inline double batch_se(const std::vector<double>& chain) {
  const int b = static_cast<int>(std::floor(std::sqrt(chain.size())));
  const int a = static_cast<int>(chain.size()) / b;
  std::vector<double> means(a);
  for (int k = 0; k < a; ++k) {
    double acc = 0.0;
    for (int t = 0; t < b; ++t) acc += chain[k * b + t];
    means[k] = acc / b;
  }
  const double grand = mean_of(means);
  double var = 0.0;
  for (double m : means) var += (m - grand) * (m - grand);
  var = var * b / (a - 1.0);
  return std::sqrt(var / static_cast<double>(chain.size()));
}

}  // namespace womble::test
