#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "womble/boundary.hpp"
#include "womble/disease_cov.hpp"
#include "womble/region_graph.hpp"

namespace womble {

/// A data-generating configuration: one latent spatial-effect field shared by
/// every replicate, counts redrawn per replicate.
struct SimScenario {
  DiseaseGraphSpec disease;
  int truncation = 15;
  double dp_alpha = 1.0;
  double tau_s = 0.25;
  Eigen::VectorXd beta;  // per-disease intercept
  Eigen::VectorXd rho;   // per-disease spatial autocorrelation
  Eigen::VectorXd eta;   // per-disease disparity coefficient (one covariate)
  Eigen::MatrixXd a_lower;                          // unstructured generator
  std::vector<std::vector<double>> alpha0, alpha1;  // directed generator
  double rho_dis = 0.25;                            // undirected generator
  double covariate_mean = 15.0, covariate_sd = 5.0;
  double expected_count = 1.0;
  int replicates = 1;
  std::uint64_t seed = 0;

  /// The reference four-disease setup: beta = (-2, 2, 1, -1),
  /// rho = (0.2, 0.8, 0.4, 0.6), eta = (0.5, 0.25, 0.33, 0.6), K = 15,
  /// alpha = 1, tau_s = 0.25; unstructured A all ones, directed pairs
  /// (0.3,0.5),(0.5,0.4),(0.4,0.4),(0.8,0.1), undirected rho_dis = 0.25 on
  /// the four-cycle disease graph.
  static SimScenario reference(DiseaseVariant variant);
};

struct SimOutput {
  Eigen::VectorXd region_covariate;  // x_i
  double z_scale = 0.0;              // sd of neighboring |x_i - x_j|
  std::vector<EdgeDissimilarity> z;  // per disease (identical entries)
  std::vector<PrecAdjacency> w_true;
  Eigen::VectorXd gamma;  // N
  Eigen::VectorXd sticks, weights, atoms;
  std::vector<int> labels;  // N, 0-based
  Eigen::VectorXd phi;      // N
  Eigen::MatrixXd expected;             // n x q
  std::vector<Eigen::MatrixXd> counts;  // one n x q matrix per replicate
};

SimOutput generate(const SimScenario& scenario, const RegionGraph& g);

/// Truth flags per canonical geographic edge from the generated labels.
std::vector<char> true_boundaries(const SimOutput& out, const RegionGraph& g,
                                  ProbeKind kind, int d, int dprime = -1);

/// Deterministic areal test map: a rows x cols triangular lattice truncated
/// to `keep` cells. keep = 58 on a 6 x 10 grid gives a map comparable in
/// size and degree to a U.S. state's county adjacency.
RegionGraph lattice_map(int rows, int cols, int keep);

}  // namespace womble
