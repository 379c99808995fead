#include "womble/disease_cov.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace womble {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void append_block(std::vector<Eigen::Triplet<double>>& trip,
                  const Eigen::SparseMatrix<double>& m, int row0, int col0,
                  double scale) {
  for (int k = 0; k < m.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
      trip.emplace_back(row0 + static_cast<int>(it.row()),
                        col0 + static_cast<int>(it.col()), scale * it.value());
    }
  }
}

}  // namespace

CrossDiseaseParams CrossDiseaseParams::unstructured(Eigen::MatrixXd a) {
  CrossDiseaseParams p;
  p.variant = DiseaseVariant::unstructured;
  p.a_lower = std::move(a);
  return p;
}

CrossDiseaseParams CrossDiseaseParams::directed(std::vector<std::vector<double>> a0,
                                                std::vector<std::vector<double>> a1) {
  CrossDiseaseParams p;
  p.variant = DiseaseVariant::directed;
  p.alpha0 = std::move(a0);
  p.alpha1 = std::move(a1);
  return p;
}

CrossDiseaseParams CrossDiseaseParams::undirected(double rho) {
  CrossDiseaseParams p;
  p.variant = DiseaseVariant::undirected;
  p.rho_dis = rho;
  return p;
}

GammaCovariance GammaCovariance::unstructured(Eigen::MatrixXd a_lower,
                                              DagarList dagars) {
  GammaCovariance cov;
  cov.variant_ = DiseaseVariant::unstructured;
  cov.q_ = static_cast<int>(dagars->size());
  cov.n_ = (*dagars)[0].size();
  cov.dagars_ = std::move(dagars);
  if (a_lower.rows() != cov.q_ || a_lower.cols() != cov.q_) {
    throw std::invalid_argument("GammaCovariance: A must be q x q");
  }
  for (int d = 0; d < cov.q_; ++d) {
    if (a_lower(d, d) <= 0.0) {
      throw std::invalid_argument("GammaCovariance: diag(A) must be positive");
    }
    for (int h = d + 1; h < cov.q_; ++h) {
      if (a_lower(d, h) != 0.0) {
        throw std::invalid_argument("GammaCovariance: A must be lower triangular");
      }
    }
  }
  cov.a_lower_ = std::move(a_lower);
  cov.finalize_unstructured();
  return cov;
}

void GammaCovariance::finalize_unstructured() {
  a_inverse_ = a_lower_.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd::Identity(q_, q_));

  // P block (d,h) = sum_{k >= max(d,h)} invA(k,d) invA(k,h) Q_k
  std::vector<Eigen::Triplet<double>> trip;
  for (int d = 0; d < q_; ++d) {
    for (int h = 0; h <= d; ++h) {
      Eigen::SparseMatrix<double> block(n_, n_);
      for (int k = d; k < q_; ++k) {
        const double c = a_inverse_(k, d) * a_inverse_(k, h);
        if (c != 0.0) block += c * (*dagars_)[k].matrix();
      }
      append_block(trip, block, d * n_, h * n_, 1.0);
      if (h != d) append_block(trip, Eigen::SparseMatrix<double>(block.transpose()), h * n_, d * n_, 1.0);
    }
  }
  precision_.resize(dim(), dim());
  precision_.setFromTriplets(trip.begin(), trip.end());
  precision_.makeCompressed();

  log_det_precision_ = 0.0;
  for (int d = 0; d < q_; ++d) {
    log_det_precision_ += (*dagars_)[d].log_det() - 2.0 * n_ * std::log(a_lower_(d, d));
  }

  // Sigma block (d,d) = sum_h A(d,h)^2 Q_h^{-1}
  std::vector<Eigen::VectorXd> diag_inv(q_);
  for (int d = 0; d < q_; ++d) diag_inv[d] = (*dagars_)[d].diag_inverse();
  marginal_sd_.resize(dim());
  for (int d = 0; d < q_; ++d) {
    Eigen::VectorXd var = Eigen::VectorXd::Zero(n_);
    for (int h = 0; h <= d; ++h) {
      var += a_lower_(d, h) * a_lower_(d, h) * diag_inv[h];
    }
    marginal_sd_.segment(d * n_, n_) = var.array().sqrt();
  }
}

GammaCovariance GammaCovariance::directed(const DiseaseGraphSpec& spec,
                                          std::vector<std::vector<double>> alpha0,
                                          std::vector<std::vector<double>> alpha1,
                                          const Eigen::SparseMatrix<double>& geo_adjacency,
                                          DagarList dagars) {
  spec.validate();
  if (spec.variant != DiseaseVariant::directed) {
    throw std::invalid_argument("GammaCovariance::directed: spec variant mismatch");
  }
  GammaCovariance cov;
  cov.variant_ = DiseaseVariant::directed;
  cov.q_ = spec.q;
  cov.n_ = (*dagars)[0].size();
  cov.dagars_ = std::move(dagars);

  Eigen::SparseMatrix<double> identity(cov.n_, cov.n_);
  identity.setIdentity();

  cov.a_blocks_.assign(cov.q_, std::vector<Eigen::SparseMatrix<double>>(cov.q_));
  for (int d = 0; d < cov.q_; ++d) {
    if (alpha0[d].size() != spec.parents[d].size() ||
        alpha1[d].size() != spec.parents[d].size()) {
      throw std::invalid_argument("GammaCovariance::directed: alpha/parents mismatch");
    }
    for (std::size_t k = 0; k < spec.parents[d].size(); ++k) {
      const int h = spec.parents[d][k];
      if (h >= d) {
        throw std::invalid_argument(
            "GammaCovariance::directed: block on or above the diagonal");
      }
      cov.a_blocks_[d][h] = alpha0[d][k] * identity + alpha1[d][k] * geo_adjacency;
    }
  }
  cov.finalize_directed();
  return cov;
}

void GammaCovariance::finalize_directed() {
  // M = I_N - A, strictly lower block structure
  Eigen::SparseMatrix<double> m(dim(), dim());
  {
    std::vector<Eigen::Triplet<double>> trip;
    for (int s = 0; s < dim(); ++s) trip.emplace_back(s, s, 1.0);
    for (int d = 0; d < q_; ++d) {
      for (int h = 0; h < d; ++h) {
        if (a_blocks_[d][h].nonZeros() > 0) {
          append_block(trip, a_blocks_[d][h], d * n_, h * n_, -1.0);
        }
      }
    }
    m.setFromTriplets(trip.begin(), trip.end());
  }

  Eigen::SparseMatrix<double> block_q(dim(), dim());
  {
    std::vector<Eigen::Triplet<double>> trip;
    for (int d = 0; d < q_; ++d) {
      append_block(trip, (*dagars_)[d].matrix(), d * n_, d * n_, 1.0);
    }
    block_q.setFromTriplets(trip.begin(), trip.end());
  }

  precision_ = Eigen::SparseMatrix<double>(m.transpose()) * block_q * m;
  precision_.makeCompressed();

  log_det_precision_ = 0.0;
  for (int d = 0; d < q_; ++d) log_det_precision_ += (*dagars_)[d].log_det();

  // C = (I-A)^{-1}; Sigma block (d,d) = sum_h C(d,h) Q_h^{-1} C(d,h)'
  Eigen::SparseMatrix<double> identity(n_, n_);
  identity.setIdentity();
  std::vector<std::vector<Eigen::SparseMatrix<double>>> c(
      q_, std::vector<Eigen::SparseMatrix<double>>(q_));
  for (int d = 0; d < q_; ++d) {
    c[d][d] = identity;
    for (int h = d - 1; h >= 0; --h) {
      Eigen::SparseMatrix<double> acc(n_, n_);
      for (int k = h; k < d; ++k) {
        if (a_blocks_[d][k].nonZeros() > 0 && c[k][h].nonZeros() > 0) {
          acc += a_blocks_[d][k] * c[k][h];
        }
      }
      c[d][h] = acc;
    }
  }
  marginal_sd_.resize(dim());
  for (int d = 0; d < q_; ++d) {
    Eigen::VectorXd var = Eigen::VectorXd::Zero(n_);
    for (int h = 0; h <= d; ++h) {
      if (c[d][h].nonZeros() == 0) continue;
      const Eigen::SparseMatrix<double> ct = c[d][h].transpose();
      const auto& dag = (*dagars_)[h];
      for (int i = 0; i < n_; ++i) {
        const Eigen::VectorXd row = ct.col(i);
        if (row.isZero(0.0)) continue;
        const Eigen::VectorXd v = dag.solve_upper(row);
        var(i) += (v.array().square() / dag.lambda().array()).sum();
      }
    }
    marginal_sd_.segment(d * n_, n_) = var.array().sqrt();
  }
}

GammaCovariance GammaCovariance::undirected(double rho_dis, const DiseaseGraphSpec& spec,
                                            DagarList dagars) {
  spec.validate();
  if (spec.variant != DiseaseVariant::undirected) {
    throw std::invalid_argument("GammaCovariance::undirected: spec variant mismatch");
  }
  const auto [lo, hi] = spec.rho_bounds();
  if (rho_dis <= lo || rho_dis >= hi) {
    throw std::invalid_argument("GammaCovariance::undirected: rho_dis outside its interval");
  }
  GammaCovariance cov;
  cov.variant_ = DiseaseVariant::undirected;
  cov.q_ = spec.q;
  cov.n_ = (*dagars)[0].size();
  cov.dagars_ = std::move(dagars);
  cov.rho_dis_ = rho_dis;
  cov.lambda_dis_ =
      Eigen::MatrixXd(spec.degrees().asDiagonal()) - rho_dis * spec.w_dis;
  cov.finalize_undirected();
  return cov;
}

void GammaCovariance::finalize_undirected() {
  chol_upper_.resize(q_);
  for (int d = 0; d < q_; ++d) {
    chol_upper_[d] = (*dagars_)[d].cholesky_upper() / std::sqrt(lambda_dis_(d, d));
  }

  // P block (d,h) = lambda_dis(d,h) R_d' R_h
  std::vector<Eigen::Triplet<double>> trip;
  for (int d = 0; d < q_; ++d) {
    for (int h = 0; h < q_; ++h) {
      if (lambda_dis_(d, h) == 0.0) continue;
      const Eigen::SparseMatrix<double> block =
          Eigen::SparseMatrix<double>(chol_upper_[d].transpose()) * chol_upper_[h];
      append_block(trip, block, d * n_, h * n_, lambda_dis_(d, h));
    }
  }
  precision_.resize(dim(), dim());
  precision_.setFromTriplets(trip.begin(), trip.end());
  precision_.makeCompressed();

  Eigen::LLT<Eigen::MatrixXd> llt(lambda_dis_);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("GammaCovariance: Lambda_dis is not positive definite");
  }
  double log_det_lambda = 0.0;
  for (int d = 0; d < q_; ++d) log_det_lambda += 2.0 * std::log(llt.matrixL()(d, d));

  log_det_precision_ = n_ * log_det_lambda;
  for (int d = 0; d < q_; ++d) {
    log_det_precision_ += (*dagars_)[d].log_det() - n_ * std::log(lambda_dis_(d, d));
  }

  // Sigma block (d,d) = (Lambda_dis^{-1})_{dd} * lambda_dd * Q_d^{-1}
  const Eigen::MatrixXd lambda_inv =
      llt.solve(Eigen::MatrixXd::Identity(q_, q_));
  marginal_sd_.resize(dim());
  for (int d = 0; d < q_; ++d) {
    const double scale = lambda_inv(d, d) * lambda_dis_(d, d);
    marginal_sd_.segment(d * n_, n_) =
        (scale * (*dagars_)[d].diag_inverse().array()).sqrt();
  }
}

GammaCovariance GammaCovariance::build(const CrossDiseaseParams& params,
                                       const DiseaseGraphSpec& spec,
                                       const Eigen::SparseMatrix<double>& geo_adjacency,
                                       DagarList dagars) {
  switch (params.variant) {
    case DiseaseVariant::unstructured:
      return unstructured(params.a_lower, std::move(dagars));
    case DiseaseVariant::directed:
      return directed(spec, params.alpha0, params.alpha1, geo_adjacency,
                      std::move(dagars));
    case DiseaseVariant::undirected:
      return undirected(params.rho_dis, spec, std::move(dagars));
  }
  throw std::logic_error("GammaCovariance::build: unknown variant");
}

double GammaCovariance::quad_form(const Eigen::VectorXd& gamma) const {
  if (gamma.size() != dim()) {
    throw std::invalid_argument("GammaCovariance: dimension mismatch");
  }
  return gamma.dot(precision_ * gamma);
}

double GammaCovariance::log_density(const Eigen::VectorXd& gamma) const {
  return 0.5 * (log_det_precision_ - quad_form(gamma) - dim() * kLog2Pi);
}

double GammaCovariance::marginal_sd(int site) const {
  if (site < 0 || site >= dim()) {
    throw std::out_of_range("GammaCovariance: site index out of range");
  }
  return marginal_sd_(site);
}

Eigen::VectorXd GammaCovariance::sample(Rng& rng) const {
  Eigen::VectorXd gamma(dim());
  switch (variant_) {
    case DiseaseVariant::unstructured: {
      Eigen::MatrixXd f(n_, q_);
      for (int d = 0; d < q_; ++d) f.col(d) = (*dagars_)[d].sample(rng);
      for (int d = 0; d < q_; ++d) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(n_);
        for (int h = 0; h <= d; ++h) g += a_lower_(d, h) * f.col(h);
        gamma.segment(d * n_, n_) = g;
      }
      break;
    }
    case DiseaseVariant::directed: {
      for (int d = 0; d < q_; ++d) {
        Eigen::VectorXd g = (*dagars_)[d].sample(rng);
        for (int h = 0; h < d; ++h) {
          if (a_blocks_[d][h].nonZeros() > 0) {
            g += a_blocks_[d][h] * gamma.segment(h * n_, n_);
          }
        }
        gamma.segment(d * n_, n_) = g;
      }
      break;
    }
    case DiseaseVariant::undirected: {
      // gamma = (plus_d R_d)^{-1} (Lambda_dis^{-1/2} (x) I) z
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lambda_dis_);
      const Eigen::MatrixXd inv_sqrt =
          es.eigenvectors() *
          es.eigenvalues().array().rsqrt().matrix().asDiagonal() *
          es.eigenvectors().transpose();
      Eigen::MatrixXd z(n_, q_);
      for (int d = 0; d < q_; ++d) {
        for (int i = 0; i < n_; ++i) z(i, d) = rng.normal();
      }
      for (int d = 0; d < q_; ++d) {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(n_);
        for (int h = 0; h < q_; ++h) w += inv_sqrt(d, h) * z.col(h);
        gamma.segment(d * n_, n_) =
            chol_upper_[d].triangularView<Eigen::Upper>().solve(w);
      }
      break;
    }
  }
  return gamma;
}

Eigen::SparseMatrix<double> geographic_adjacency(const RegionGraph& g) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(2 * g.edges().size());
  for (auto [a, b] : g.edges()) {
    trip.emplace_back(a, b, 1.0);
    trip.emplace_back(b, a, 1.0);
  }
  Eigen::SparseMatrix<double> w(g.size(), g.size());
  w.setFromTriplets(trip.begin(), trip.end());
  return w;
}

}  // namespace womble
