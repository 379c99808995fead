#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unordered_map>
#include <utility>
#include <vector>

#include "womble/region_graph.hpp"
#include "womble/rng.hpp"

namespace womble {

/// Per-disease dissimilarity covariates z_ij for ordered preceding-neighbor
/// pairs (i later in the order, j its preceding neighbor). Every component
/// must be non-negative.
class EdgeDissimilarity {
 public:
  explicit EdgeDissimilarity(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  void set(int i, int j, Eigen::VectorXd z);
  bool has(int i, int j) const;
  const Eigen::VectorXd& get(int i, int j) const;

  const std::unordered_map<long, Eigen::VectorXd>& entries() const { return z_; }

  /// Column-wise quantile (linear interpolation) over all stored pairs,
  /// used to place the upper bound on each disparity coefficient.
  Eigen::VectorXd column_quantile(double prob) const;

 private:
  static long key(int i, int j) { return static_cast<long>(i) * 1000000L + j; }
  int dim_;
  std::unordered_map<long, Eigen::VectorXd> z_;
};

/// W(eta): surviving preceding-neighbor links, strictly lower triangular
/// with respect to the topological order.
struct PrecAdjacency {
  int n = 0;
  /// kept[i] = preceding neighbors j of i with w_ij = 1, sorted by position.
  std::vector<std::vector<int>> kept;

  int degree(int i) const { return static_cast<int>(kept[i].size()); }
  int link_count() const;
  Eigen::MatrixXd dense() const;
};

/// Retain every preceding-neighbor link of the map (the unmodified DAGAR).
PrecAdjacency full_preceding_adjacency(const RegionGraph& g);

/// w_ij = 1 iff exp(-z_ij' eta) >= 0.5 for a preceding-neighbor pair, else 0.
/// The tie at exactly 0.5 keeps the link. Missing z for a required pair and
/// negative eta components are errors.
PrecAdjacency adjacency_from_eta(const RegionGraph& g, const EdgeDissimilarity& z,
                                 const Eigen::VectorXd& eta);

/// The modified DAGAR precision Q(rho, W) = (I-B)' Lambda (I-B), with
/// B = Btilde o W. Stores the sparse Q together with the triangular factor
/// data needed for solves, sampling and log-determinants.
class DagarPrecision {
 public:
  DagarPrecision(const RegionGraph& g, PrecAdjacency w, double rho);

  int size() const { return n_; }
  double rho() const { return rho_; }
  const PrecAdjacency& adjacency() const { return w_; }
  const Eigen::SparseMatrix<double>& matrix() const { return q_; }
  const Eigen::VectorXd& lambda() const { return lambda_; }
  double b_coef(int i) const { return b_coef_(i); }

  /// log det Q = sum_i log lambda_i (unit-triangular factors).
  double log_det() const;

  /// Solve (I-B) x = y.
  Eigen::VectorXd solve_lower(const Eigen::VectorXd& y) const;
  /// Solve (I-B)' x = y.
  Eigen::VectorXd solve_upper(const Eigen::VectorXd& y) const;

  /// Draw from N(0, Q^{-1}).
  Eigen::VectorXd sample(Rng& rng) const;

  /// Diagonal of Q^{-1}.
  Eigen::VectorXd diag_inverse() const;

  /// Upper-triangular Cholesky factor R with R'R = Q (natural ordering).
  Eigen::SparseMatrix<double> cholesky_upper() const;

 private:
  int n_;
  double rho_;
  PrecAdjacency w_;
  Eigen::VectorXd lambda_;
  Eigen::VectorXd b_coef_;
  std::vector<int> by_position_;  // regions in ascending topological position
  /// children_[j] = pairs (i, b_i) with j a kept preceding neighbor of i.
  std::vector<std::vector<std::pair<int, double>>> children_;
  Eigen::SparseMatrix<double> q_;
};

}  // namespace womble
