#include "womble/dagar.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace womble {

void EdgeDissimilarity::set(int i, int j, Eigen::VectorXd z) {
  if (z.size() != dim_) {
    throw std::invalid_argument("EdgeDissimilarity: dissimilarity vector has wrong length");
  }
  if ((z.array() < 0.0).any()) {
    throw std::invalid_argument("EdgeDissimilarity: components must be non-negative");
  }
  z_[key(i, j)] = std::move(z);
}

bool EdgeDissimilarity::has(int i, int j) const { return z_.count(key(i, j)) > 0; }

const Eigen::VectorXd& EdgeDissimilarity::get(int i, int j) const {
  auto it = z_.find(key(i, j));
  if (it == z_.end()) {
    throw std::invalid_argument("EdgeDissimilarity: missing pair (" +
                                std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
  }
  return it->second;
}

Eigen::VectorXd EdgeDissimilarity::column_quantile(double prob) const {
  if (z_.empty()) throw std::logic_error("EdgeDissimilarity: no pairs stored");
  Eigen::VectorXd out(dim_);
  std::vector<double> col(z_.size());
  for (int r = 0; r < dim_; ++r) {
    std::size_t k = 0;
    for (const auto& [key, z] : z_) col[k++] = z(r);
    std::sort(col.begin(), col.end());
    // linear interpolation between order statistics
    const double h = prob * (static_cast<double>(col.size()) - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, col.size() - 1);
    out(r) = col[lo] + (h - std::floor(h)) * (col[hi] - col[lo]);
  }
  return out;
}

int PrecAdjacency::link_count() const {
  int total = 0;
  for (const auto& k : kept) total += static_cast<int>(k.size());
  return total;
}

Eigen::MatrixXd PrecAdjacency::dense() const {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j : kept[i]) w(i, j) = 1.0;
  }
  return w;
}

PrecAdjacency full_preceding_adjacency(const RegionGraph& g) {
  PrecAdjacency w;
  w.n = g.size();
  w.kept.resize(w.n);
  for (int i = 0; i < w.n; ++i) w.kept[i] = g.preceding_neighbors(i);
  return w;
}

PrecAdjacency adjacency_from_eta(const RegionGraph& g, const EdgeDissimilarity& z,
                                 const Eigen::VectorXd& eta) {
  if ((eta.array() < 0.0).any()) {
    throw std::invalid_argument("adjacency_from_eta: eta components must be non-negative");
  }
  if (eta.size() != z.dim()) {
    throw std::invalid_argument("adjacency_from_eta: eta length != dissimilarity dimension");
  }
  PrecAdjacency w;
  w.n = g.size();
  w.kept.resize(w.n);
  for (int i = 0; i < w.n; ++i) {
    for (int j : g.preceding_neighbors(i)) {
      if (std::exp(-z.get(i, j).dot(eta)) >= 0.5) w.kept[i].push_back(j);
    }
  }
  return w;
}

DagarPrecision::DagarPrecision(const RegionGraph& g, PrecAdjacency w, double rho)
    : n_(g.size()), rho_(rho), w_(std::move(w)) {
  if (rho < 0.0 || rho >= 1.0) {
    throw std::invalid_argument("DagarPrecision: rho must lie in [0, 1)");
  }
  if (w_.n != n_) throw std::invalid_argument("DagarPrecision: adjacency size mismatch");

  lambda_.resize(n_);
  b_coef_.resize(n_);
  const double rho2 = rho * rho;
  for (int i = 0; i < n_; ++i) {
    const double deg = static_cast<double>(w_.degree(i));
    const double denom = 1.0 + (deg - 1.0) * rho2;
    b_coef_(i) = rho / denom;
    lambda_(i) = denom / (1.0 - rho2);
  }

  by_position_ = g.by_position();
  children_.assign(n_, {});
  for (int i = 0; i < n_; ++i) {
    for (int j : w_.kept[i]) children_[j].emplace_back(i, b_coef_(i));
  }

  // Q = sum_i lambda_i c_i c_i' with c_i = e_i - b_i * sum_{j in kept[i]} e_j
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n_) + 4 * w_.link_count());
  for (int i = 0; i < n_; ++i) {
    const double li = lambda_(i);
    const double bi = b_coef_(i);
    trip.emplace_back(i, i, li);
    for (int j : w_.kept[i]) {
      trip.emplace_back(i, j, -li * bi);
      trip.emplace_back(j, i, -li * bi);
      for (int k : w_.kept[i]) trip.emplace_back(j, k, li * bi * bi);
    }
  }
  q_.resize(n_, n_);
  q_.setFromTriplets(trip.begin(), trip.end());
  q_.makeCompressed();
}

double DagarPrecision::log_det() const { return lambda_.array().log().sum(); }

Eigen::VectorXd DagarPrecision::solve_lower(const Eigen::VectorXd& y) const {
  Eigen::VectorXd x(n_);
  for (int i : by_position_) {
    double acc = y(i);
    const double bi = b_coef_(i);
    for (int j : w_.kept[i]) acc += bi * x(j);
    x(i) = acc;
  }
  return x;
}

Eigen::VectorXd DagarPrecision::solve_upper(const Eigen::VectorXd& y) const {
  Eigen::VectorXd x(n_);
  for (auto it = by_position_.rbegin(); it != by_position_.rend(); ++it) {
    const int j = *it;
    double acc = y(j);
    for (auto [i, bi] : children_[j]) acc += bi * x(i);
    x(j) = acc;
  }
  return x;
}

Eigen::VectorXd DagarPrecision::sample(Rng& rng) const {
  Eigen::VectorXd z(n_);
  for (int i = 0; i < n_; ++i) z(i) = rng.normal() / std::sqrt(lambda_(i));
  return solve_lower(z);
}

Eigen::VectorXd DagarPrecision::diag_inverse() const {
  Eigen::VectorXd out(n_);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n_);
  for (int i = 0; i < n_; ++i) {
    e(i) = 1.0;
    const Eigen::VectorXd v = solve_upper(e);
    out(i) = (v.array().square() / lambda_.array()).sum();
    e(i) = 0.0;
  }
  return out;
}

Eigen::SparseMatrix<double> DagarPrecision::cholesky_upper() const {
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                       Eigen::NaturalOrdering<int>>
      llt(q_);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("DagarPrecision: sparse Cholesky failed");
  }
  return Eigen::SparseMatrix<double>(llt.matrixU());
}

}  // namespace womble
