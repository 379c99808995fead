#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <vector>

#include "womble/dagar.hpp"
#include "womble/region_graph.hpp"
#include "womble/rng.hpp"

namespace womble {

using DagarList = std::shared_ptr<const std::vector<DagarPrecision>>;

/// Cross-disease parameters; exactly one member is live, selected by variant.
struct CrossDiseaseParams {
  DiseaseVariant variant = DiseaseVariant::unstructured;
  /// Unstructured: q x q lower triangular with positive diagonal.
  Eigen::MatrixXd a_lower;
  /// Directed: coefficient pairs aligned with DiseaseGraphSpec::parents.
  std::vector<std::vector<double>> alpha0, alpha1;
  /// Undirected: scalar inside the disease graph's rho bounds.
  double rho_dis = 0.0;

  static CrossDiseaseParams unstructured(Eigen::MatrixXd a);
  static CrossDiseaseParams directed(std::vector<std::vector<double>> a0,
                                     std::vector<std::vector<double>> a1);
  static CrossDiseaseParams undirected(double rho);
};

/// The N x N (N = nq) joint Gaussian law of gamma for one setting of the
/// per-disease DAGAR precisions and the cross-disease parameters. Sites are
/// enumerated disease-major: site = d*n + i. Immutable once built; assembly
/// happens through the per-disease sparse factors, never a dense N x N
/// inverse.
class GammaCovariance {
 public:
  static GammaCovariance unstructured(Eigen::MatrixXd a_lower, DagarList dagars);
  static GammaCovariance directed(const DiseaseGraphSpec& spec,
                                  std::vector<std::vector<double>> alpha0,
                                  std::vector<std::vector<double>> alpha1,
                                  const Eigen::SparseMatrix<double>& geo_adjacency,
                                  DagarList dagars);
  static GammaCovariance undirected(double rho_dis, const DiseaseGraphSpec& spec,
                                    DagarList dagars);

  static GammaCovariance build(const CrossDiseaseParams& params,
                               const DiseaseGraphSpec& spec,
                               const Eigen::SparseMatrix<double>& geo_adjacency,
                               DagarList dagars);

  int dim() const { return n_ * q_; }
  int regions() const { return n_; }
  int diseases() const { return q_; }
  DiseaseVariant variant() const { return variant_; }
  const DagarPrecision& dagar(int d) const { return (*dagars_)[d]; }
  const DagarList& dagars() const { return dagars_; }

  const Eigen::SparseMatrix<double>& precision() const { return precision_; }
  double log_det_precision() const { return log_det_precision_; }
  double quad_form(const Eigen::VectorXd& gamma) const;
  /// Gaussian log density: -(1/2) g'Pg + (1/2) log|P| - (N/2) log 2pi.
  double log_density(const Eigen::VectorXd& gamma) const;

  double marginal_sd(int site) const;
  const Eigen::VectorXd& marginal_sds() const { return marginal_sd_; }

  Eigen::VectorXd sample(Rng& rng) const;

 private:
  GammaCovariance() = default;
  void finalize_unstructured();
  void finalize_directed();
  void finalize_undirected();

  DiseaseVariant variant_ = DiseaseVariant::unstructured;
  int n_ = 0, q_ = 0;
  DagarList dagars_;

  Eigen::MatrixXd a_lower_, a_inverse_;                 // unstructured
  std::vector<std::vector<Eigen::SparseMatrix<double>>> a_blocks_;  // directed, lower blocks
  Eigen::MatrixXd lambda_dis_;                          // undirected
  double rho_dis_ = 0.0;
  std::vector<Eigen::SparseMatrix<double>> chol_upper_;  // undirected R_d

  Eigen::SparseMatrix<double> precision_;
  double log_det_precision_ = 0.0;
  Eigen::VectorXd marginal_sd_;
};

/// Symmetric 0/1 geographic adjacency of the map as a sparse matrix.
Eigen::SparseMatrix<double> geographic_adjacency(const RegionGraph& g);

}  // namespace womble
