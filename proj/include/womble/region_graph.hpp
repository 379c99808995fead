#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace womble {

/// The areal map: regions, symmetric geographic adjacency, a fixed
/// topological order, and optional planar centroids. Immutable after
/// construction and safe to share across threads.
class RegionGraph {
 public:
  /// `edges` holds unordered neighbor pairs (0-based); duplicates and
  /// self-loops are rejected. `order[i]` is the topological position of
  /// region i; empty means input index order.
  RegionGraph(int n, std::vector<std::pair<int, int>> edges,
              std::vector<int> order = {});

  int size() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  /// Canonical unordered edges, i < j, sorted lexicographically.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  const std::vector<int>& neighbors(int i) const;

  /// Topological position of region i.
  int position(int i) const;
  const std::vector<int>& order() const { return order_; }
  /// Regions listed by ascending topological position.
  const std::vector<int>& by_position() const { return by_position_; }

  /// Neighbors of i that precede it in the topological order, sorted by
  /// position. Its length is n_{<i} for the full geographic map.
  std::vector<int> preceding_neighbors(int i) const;

  void set_centroids(std::vector<std::array<double, 2>> xy);
  bool has_centroids() const { return !centroids_.empty(); }
  const std::vector<std::array<double, 2>>& centroids() const;

 private:
  void check_index(int i) const;

  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> order_;
  std::vector<int> by_position_;
  std::vector<std::array<double, 2>> centroids_;
};

enum class DiseaseVariant { unstructured, directed, undirected };

/// Inter-disease graph: disease count, variant, and for the graphical
/// variants the adjacency structure with its spectral bounds.
struct DiseaseGraphSpec {
  int q = 1;
  DiseaseVariant variant = DiseaseVariant::unstructured;
  /// Directed variant: parents[d] lists the parents of disease d, each < d.
  std::vector<std::vector<int>> parents;
  /// Undirected variant: q x q binary symmetric adjacency.
  Eigen::MatrixXd w_dis;

  void validate() const;
  Eigen::VectorXd degrees() const;
  /// Valid open interval (1/zeta_min, zeta_max) for rho_dis, where
  /// zeta_min/zeta_max are the extreme eigenvalues of
  /// D^{-1/2} W D^{-1/2}. Requires every disease node to have degree >= 1.
  std::pair<double, double> rho_bounds() const;

  static DiseaseGraphSpec make_unstructured(int q);
  static DiseaseGraphSpec make_directed(int q, std::vector<std::vector<int>> parents);
  static DiseaseGraphSpec make_undirected(Eigen::MatrixXd w);
};

/// Assign each region pair to a distance order: pair (i,j) lands in order r
/// iff its centroid distance lies in (bins[r-1], bins[r]], with bins[-1] = 0.
/// Pairs farther than the last cut point are dropped.
std::vector<std::vector<std::pair<int, int>>> rth_order_neighbors(
    const RegionGraph& g, const std::vector<double>& bins);

/// Symmetric 0/1 geographic adjacency as a sparse-friendly dense matrix.
Eigen::MatrixXd dense_adjacency(const RegionGraph& g);

}  // namespace womble
