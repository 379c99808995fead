#include "womble/region_graph.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace womble {

RegionGraph::RegionGraph(int n, std::vector<std::pair<int, int>> edges,
                         std::vector<int> order)
    : n_(n) {
  if (n <= 0) throw std::invalid_argument("RegionGraph: need at least one region");
  std::set<std::pair<int, int>> seen;
  edges_.reserve(edges.size());
  for (auto [a, b] : edges) {
    if (a == b) {
      throw std::invalid_argument("RegionGraph: self-loop at region " + std::to_string(a + 1));
    }
    if (a < 0 || b < 0 || a >= n || b >= n) {
      throw std::invalid_argument("RegionGraph: edge endpoint out of range");
    }
    auto e = std::minmax(a, b);
    if (!seen.insert({e.first, e.second}).second) {
      throw std::invalid_argument("RegionGraph: duplicate edge (" +
                                  std::to_string(e.first + 1) + "," +
                                  std::to_string(e.second + 1) + ")");
    }
  }
  edges_.assign(seen.begin(), seen.end());

  adjacency_.assign(n_, {});
  for (auto [a, b] : edges_) {
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());

  if (order.empty()) {
    order_.resize(n_);
    for (int i = 0; i < n_; ++i) order_[i] = i;
  } else {
    if (static_cast<int>(order.size()) != n_) {
      throw std::invalid_argument("RegionGraph: order length != region count");
    }
    std::vector<char> hit(n_, 0);
    for (int pos : order) {
      if (pos < 0 || pos >= n_ || hit[pos]) {
        throw std::invalid_argument("RegionGraph: order is not a permutation");
      }
      hit[pos] = 1;
    }
    order_ = std::move(order);
  }
  by_position_.assign(n_, 0);
  for (int i = 0; i < n_; ++i) by_position_[order_[i]] = i;
}

void RegionGraph::check_index(int i) const {
  if (i < 0 || i >= n_) {
    throw std::out_of_range("RegionGraph: region index " + std::to_string(i + 1) +
                            " out of range");
  }
}

const std::vector<int>& RegionGraph::neighbors(int i) const {
  check_index(i);
  return adjacency_[i];
}

int RegionGraph::position(int i) const {
  check_index(i);
  return order_[i];
}

std::vector<int> RegionGraph::preceding_neighbors(int i) const {
  check_index(i);
  std::vector<int> out;
  for (int j : adjacency_[i]) {
    if (order_[j] < order_[i]) out.push_back(j);
  }
  std::sort(out.begin(), out.end(),
            [this](int a, int b) { return order_[a] < order_[b]; });
  return out;
}

void RegionGraph::set_centroids(std::vector<std::array<double, 2>> xy) {
  if (static_cast<int>(xy.size()) != n_) {
    throw std::invalid_argument("RegionGraph: centroid count != region count");
  }
  centroids_ = std::move(xy);
}

const std::vector<std::array<double, 2>>& RegionGraph::centroids() const {
  if (centroids_.empty()) throw std::logic_error("RegionGraph: centroids not set");
  return centroids_;
}

void DiseaseGraphSpec::validate() const {
  if (q <= 0) throw std::invalid_argument("DiseaseGraphSpec: q must be positive");
  switch (variant) {
    case DiseaseVariant::unstructured:
      break;
    case DiseaseVariant::directed: {
      if (static_cast<int>(parents.size()) != q) {
        throw std::invalid_argument("DiseaseGraphSpec: parents list length != q");
      }
      for (int d = 0; d < q; ++d) {
        for (int h : parents[d]) {
          if (h < 0 || h >= d) {
            throw std::invalid_argument(
                "DiseaseGraphSpec: parent must precede the disease in the ordering");
          }
        }
      }
      break;
    }
    case DiseaseVariant::undirected: {
      if (w_dis.rows() != q || w_dis.cols() != q) {
        throw std::invalid_argument("DiseaseGraphSpec: W_dis must be q x q");
      }
      for (int a = 0; a < q; ++a) {
        if (w_dis(a, a) != 0.0) {
          throw std::invalid_argument("DiseaseGraphSpec: W_dis has a self-loop");
        }
        for (int b = 0; b < q; ++b) {
          if (w_dis(a, b) != w_dis(b, a) ||
              (w_dis(a, b) != 0.0 && w_dis(a, b) != 1.0)) {
            throw std::invalid_argument("DiseaseGraphSpec: W_dis must be binary symmetric");
          }
        }
      }
      break;
    }
  }
}

Eigen::VectorXd DiseaseGraphSpec::degrees() const {
  return w_dis.rowwise().sum();
}

std::pair<double, double> DiseaseGraphSpec::rho_bounds() const {
  validate();
  if (variant != DiseaseVariant::undirected) {
    throw std::logic_error("rho_bounds: only defined for the undirected variant");
  }
  const Eigen::VectorXd deg = degrees();
  for (int d = 0; d < q; ++d) {
    if (deg(d) <= 0.0) {
      throw std::invalid_argument("rho_bounds: disease node " + std::to_string(d + 1) +
                                  " is isolated; D_dis not invertible");
    }
  }
  const Eigen::VectorXd inv_sqrt = deg.array().rsqrt();
  const Eigen::MatrixXd scaled =
      inv_sqrt.asDiagonal() * w_dis * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled);
  const double zeta_min = es.eigenvalues().minCoeff();
  const double zeta_max = es.eigenvalues().maxCoeff();
  if (zeta_min >= 0.0) {
    throw std::logic_error("rho_bounds: expected a negative extreme eigenvalue");
  }
  return {1.0 / zeta_min, zeta_max};
}

DiseaseGraphSpec DiseaseGraphSpec::make_unstructured(int q) {
  DiseaseGraphSpec s;
  s.q = q;
  s.variant = DiseaseVariant::unstructured;
  s.validate();
  return s;
}

DiseaseGraphSpec DiseaseGraphSpec::make_directed(int q,
                                                 std::vector<std::vector<int>> parents) {
  DiseaseGraphSpec s;
  s.q = q;
  s.variant = DiseaseVariant::directed;
  s.parents = std::move(parents);
  s.validate();
  return s;
}

DiseaseGraphSpec DiseaseGraphSpec::make_undirected(Eigen::MatrixXd w) {
  DiseaseGraphSpec s;
  s.q = static_cast<int>(w.rows());
  s.variant = DiseaseVariant::undirected;
  s.w_dis = std::move(w);
  s.validate();
  return s;
}

std::vector<std::vector<std::pair<int, int>>> rth_order_neighbors(
    const RegionGraph& g, const std::vector<double>& bins) {
  if (!g.has_centroids()) {
    throw std::invalid_argument("rth_order_neighbors: centroids missing");
  }
  if (bins.empty() || bins.front() <= 0.0) {
    throw std::invalid_argument("rth_order_neighbors: bins must start above 0");
  }
  for (std::size_t r = 1; r < bins.size(); ++r) {
    if (bins[r] <= bins[r - 1]) {
      throw std::invalid_argument("rth_order_neighbors: bins must be strictly increasing");
    }
  }
  const auto& xy = g.centroids();
  std::vector<std::vector<std::pair<int, int>>> out(bins.size());
  for (int i = 0; i < g.size(); ++i) {
    for (int j = i + 1; j < g.size(); ++j) {
      const double dx = xy[i][0] - xy[j][0];
      const double dy = xy[i][1] - xy[j][1];
      const double dist = std::sqrt(dx * dx + dy * dy);
      if (dist > bins.back()) continue;
      // right-closed intervals (d_{r-1}, d_r]
      const auto it = std::lower_bound(bins.begin(), bins.end(), dist);
      out[static_cast<std::size_t>(it - bins.begin())].emplace_back(i, j);
    }
  }
  return out;
}

Eigen::MatrixXd dense_adjacency(const RegionGraph& g) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(g.size(), g.size());
  for (auto [a, b] : g.edges()) {
    w(a, b) = 1.0;
    w(b, a) = 1.0;
  }
  return w;
}

}  // namespace womble
