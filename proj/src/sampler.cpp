#include "womble/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace womble {

namespace {

double logit(double x) { return std::log(x) - std::log1p(-x); }

double inv_logit(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// log d/dx inv_logit(x) = x - 2 log(1 + e^x), evaluated stably.
double log_logistic_jacobian(double x) {
  const double a = std::abs(x);
  return -a - 2.0 * std::log1p(std::exp(-a));
}

double clamp_open(double x, double lo, double hi) {
  const double eps = 1e-12 * (hi - lo);
  return std::min(std::max(x, lo + eps), hi - eps);
}

}  // namespace

PriorSpec PriorSpec::defaults(int q) {
  PriorSpec p;
  p.wishart_psi = 0.1 * Eigen::MatrixXd::Identity(q, q);
  return p;
}

double AcceptanceLog::rate(const std::string& block) const {
  auto it = proposed.find(block);
  if (it == proposed.end() || it->second == 0) return 0.0;
  return static_cast<double>(accepted.at(block)) / static_cast<double>(it->second);
}

ObservedData ObservedData::intercept_only(int n, int q, Eigen::MatrixXd counts,
                                          std::vector<EdgeDissimilarity> z) {
  ObservedData d;
  d.n = n;
  d.q = q;
  d.p = 1;
  d.y = std::move(counts);
  d.expected = Eigen::MatrixXd::Ones(n, q);
  d.design = Eigen::MatrixXd::Ones(n * q, 1);
  d.design_names = {"intercept"};
  d.z = std::move(z);
  return d;
}

void ObservedData::validate(const RegionGraph& g) const {
  if (g.size() != n) throw std::invalid_argument("ObservedData: region count mismatch");
  if (y.rows() != n || y.cols() != q || expected.rows() != n || expected.cols() != q) {
    throw std::invalid_argument("ObservedData: count matrix shape mismatch");
  }
  if (design.rows() != n * q || design.cols() != p) {
    throw std::invalid_argument("ObservedData: design shape mismatch");
  }
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < q; ++d) {
      if (y(i, d) < 0.0 || y(i, d) != std::floor(y(i, d))) {
        throw std::invalid_argument("ObservedData: counts must be non-negative integers");
      }
      if (expected(i, d) <= 0.0) {
        throw std::invalid_argument("ObservedData: expected counts must be positive");
      }
    }
  }
  if (!z.empty()) {
    if (static_cast<int>(z.size()) != q) {
      throw std::invalid_argument("ObservedData: need one dissimilarity set per disease");
    }
    for (const auto& zd : z) {
      if (zd.dim() == 0) continue;
      for (int i = 0; i < n; ++i) {
        for (int j : g.preceding_neighbors(i)) {
          if (!zd.has(i, j)) {
            throw std::invalid_argument(
                "ObservedData: missing dissimilarity for preceding-neighbor pair (" +
                std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
          }
        }
      }
    }
  }
}

double poisson_loglik(const ObservedData& data, const Eigen::VectorXd& beta,
                      const Eigen::VectorXd& phi) {
  const int n = data.n, q = data.q, p = data.p;
  double total = 0.0;
  for (int d = 0; d < q; ++d) {
    for (int i = 0; i < n; ++i) {
      const int s = d * n + i;
      const double lp = data.design.row(s).dot(beta.segment(d * p, p)) + phi(s);
      const double e = data.expected(i, d);
      if (!std::isfinite(lp)) {
        throw std::invalid_argument("poisson_loglik: non-finite linear predictor");
      }
      total += data.y(i, d) * (std::log(e) + lp) - e * std::exp(lp) -
               std::lgamma(data.y(i, d) + 1.0);
    }
  }
  return total;
}

Sampler::Sampler(const ObservedData& data, const RegionGraph& graph,
                 const DiseaseGraphSpec& disease, const PriorSpec& priors,
                 const ChainConfig& config)
    : data_(data),
      graph_(graph),
      disease_(disease),
      priors_(priors),
      config_(config),
      rng_(config.seed),
      cov_(GammaCovariance::unstructured(
          Eigen::MatrixXd::Identity(1, 1),
          std::make_shared<std::vector<DagarPrecision>>(
              std::vector<DagarPrecision>{DagarPrecision(
                  RegionGraph(1, {}), PrecAdjacency{1, {{}}}, 0.0)}))) {
  disease_.validate();
  data_.validate(graph_);
  n_ = data.n;
  q_ = data.q;
  p_ = data.p;
  big_n_ = n_ * q_;
  k_ = config.truncation;
  if (k_ < 1) throw std::invalid_argument("Sampler: truncation must be >= 1");
  if (config.burnin > config.iterations || config.burnin < 0 || config.thin < 1) {
    throw std::invalid_argument("Sampler: invalid chain schedule");
  }
  if (disease_.q != q_) throw std::invalid_argument("Sampler: disease count mismatch");
  if (priors_.wishart_psi.rows() == 0) {
    priors_.wishart_psi = 0.1 * Eigen::MatrixXd::Identity(q_, q_);
  }

  geo_adjacency_ = geographic_adjacency(graph_);

  // Disparity-coefficient bounds: M_r = -log(0.5) / median(z_r).
  eta_max_.resize(q_);
  for (int d = 0; d < q_; ++d) {
    const int rd = data_.z.empty() ? 0 : data_.z[d].dim();
    if (!priors_.eta_max.empty()) {
      eta_max_[d] = priors_.eta_max[d];
      if (eta_max_[d].size() != rd) {
        throw std::invalid_argument("Sampler: eta_max dimension mismatch");
      }
    } else if (rd > 0) {
      const Eigen::VectorXd med = data_.z[d].column_quantile(0.5);
      eta_max_[d].resize(rd);
      for (int r = 0; r < rd; ++r) {
        if (med(r) <= 0.0) {
          throw std::invalid_argument(
              "Sampler: z column median is zero; cannot bound the disparity coefficient");
        }
        eta_max_[d](r) = -std::log(0.5) / med(r);
      }
    } else {
      eta_max_[d].resize(0);
    }
  }
  eta_offsets_.resize(q_ + 1);
  eta_offsets_[0] = 0;
  for (int d = 0; d < q_; ++d) {
    eta_offsets_[d + 1] = eta_offsets_[d] + static_cast<int>(eta_max_[d].size());
  }
  eta_dim_ = eta_offsets_[q_];

  // Initial state: interior points of every support.
  beta_ = Eigen::VectorXd::Zero(q_ * p_);
  theta_.resize(k_);
  for (int k = 0; k < k_; ++k) theta_(k) = rng_.normal();
  tau_s_ = 1.0;
  sticks_.assign(k_, 0.5);
  sticks_[k_ - 1] = 1.0;
  gamma_ = Eigen::VectorXd::Zero(big_n_);
  rho_ = Eigen::VectorXd::Constant(q_, 0.5);
  eta_.resize(eta_dim_);
  for (int d = 0; d < q_; ++d) {
    for (int r = 0; r < eta_max_[d].size(); ++r) {
      eta_(eta_offsets_[d] + r) = 0.5 * eta_max_[d](r);
    }
  }
  switch (disease_.variant) {
    case DiseaseVariant::unstructured:
      cross_ = CrossDiseaseParams::unstructured(Eigen::MatrixXd::Identity(q_, q_));
      break;
    case DiseaseVariant::directed: {
      std::vector<std::vector<double>> zeros(q_);
      for (int d = 0; d < q_; ++d) zeros[d].assign(disease_.parents[d].size(), 0.0);
      cross_ = CrossDiseaseParams::directed(zeros, zeros);
      break;
    }
    case DiseaseVariant::undirected:
      cross_ = CrossDiseaseParams::undirected(0.0);
      break;
  }

  weights_ = weights_from_sticks(sticks_);
  lin_pred_.resize(big_n_);
  for (int d = 0; d < q_; ++d) {
    lin_pred_.segment(d * n_, n_) =
        data_.design.middleRows(d * n_, n_) * beta_.segment(d * p_, p_);
  }

  auto dagars = std::make_shared<std::vector<DagarPrecision>>(build_dagars(rho_, eta_));
  install_cov(build_cov(std::move(dagars)));
  cdf_.resize(big_n_);
  for (int s = 0; s < big_n_; ++s) {
    cdf_(s) = normal_cdf(gamma_(s) / cov_.marginal_sd(s));
  }
  refresh_labels();

  if (!std::isfinite(log_likelihood()) || !std::isfinite(cov_.log_density(gamma_))) {
    throw std::runtime_error("Sampler: non-finite posterior at initialization");
  }
}

std::vector<DagarPrecision> Sampler::build_dagars(const Eigen::VectorXd& rho,
                                                  const Eigen::VectorXd& eta) const {
  std::vector<DagarPrecision> out;
  out.reserve(q_);
  for (int d = 0; d < q_; ++d) {
    PrecAdjacency w;
    if (eta_max_[d].size() == 0) {
      w = full_preceding_adjacency(graph_);
    } else {
      w = adjacency_from_eta(graph_, data_.z[d],
                             eta.segment(eta_offsets_[d], eta_max_[d].size()));
    }
    out.emplace_back(graph_, std::move(w), rho(d));
  }
  return out;
}

GammaCovariance Sampler::build_cov(DagarList dagars) const {
  return build_cov(std::move(dagars), cross_);
}

GammaCovariance Sampler::build_cov(DagarList dagars,
                                   const CrossDiseaseParams& cross) const {
  return GammaCovariance::build(cross, disease_, geo_adjacency_, std::move(dagars));
}

// Refreshes the precision-dependent caches. The per-site CDF values, labels
// and spatial effects are deliberately left alone: they change only inside
// the gamma and stick updates, whose acceptance ratios screen the likelihood
// consequences of a label flip.
void Sampler::install_cov(GammaCovariance cov) {
  cov_ = std::move(cov);
  precision_gamma_ = cov_.precision() * gamma_;
  quad_ = gamma_.dot(precision_gamma_);
}

void Sampler::refresh_labels() {
  labels_.resize(big_n_);
  phi_.resize(big_n_);
  for (int s = 0; s < big_n_; ++s) {
    labels_[s] = label_from_cdf(cdf_(s), weights_);
    phi_(s) = theta_(labels_[s]);
  }
}

double Sampler::site_loglik(int site, double atom) const {
  if (config_.no_likelihood) return 0.0;
  const double lp = lin_pred_(site) + atom;
  return data_.count(site) * lp - data_.offset(site) * std::exp(lp);
}

double Sampler::total_loglik(const Eigen::VectorXd& lin_pred,
                             const Eigen::VectorXd& phi) const {
  if (config_.no_likelihood) return 0.0;
  double total = 0.0;
  for (int s = 0; s < big_n_; ++s) {
    const double lp = lin_pred(s) + phi(s);
    total += data_.count(s) * lp - data_.offset(s) * std::exp(lp);
  }
  return total;
}

double Sampler::log_likelihood() const { return total_loglik(lin_pred_, phi_); }

double Sampler::step_scale(const std::string& block) const {
  double base = 0.0;
  if (block == "beta") base = config_.step_beta;
  else if (block == "theta") base = config_.step_theta;
  else if (block == "sticks") base = config_.step_v;
  else if (block == "rho") base = config_.step_rho;
  else if (block == "eta") base = config_.step_eta;
  else if (block == "cross") base = config_.step_a;
  else if (block == "rho_dis") base = config_.step_rho_dis;
  else if (block == "gamma") base = config_.step_gamma;
  else throw std::invalid_argument("step_scale: unknown block " + block);
  auto it = log_scale_.find(block);
  return base * std::exp(it == log_scale_.end() ? 0.0 : it->second);
}

void Sampler::adapt(const std::string& block, double log_ratio, int iter,
                    double target) {
  if (iter >= config_.burnin) return;  // adaptation freezes at end of burn-in
  const double acc =
      std::isfinite(log_ratio) ? std::exp(std::min(0.0, log_ratio)) : 0.0;
  log_scale_[block] +=
      std::pow(static_cast<double>(iter) + 2.0, -config_.adapt_decay) * (acc - target);
}

Sampler::StepResult Sampler::step_beta() {
  StepResult res;
  if (p_ == 0) return res;
  const double scale = step_scale("beta");
  Eigen::VectorXd prop = beta_;
  for (int j = 0; j < prop.size(); ++j) prop(j) += scale * rng_.normal();

  Eigen::VectorXd lin(big_n_);
  for (int d = 0; d < q_; ++d) {
    lin.segment(d * n_, n_) =
        data_.design.middleRows(d * n_, n_) * prop.segment(d * p_, p_);
  }
  double lr = total_loglik(lin, phi_) - total_loglik(lin_pred_, phi_);
  lr += (beta_.squaredNorm() - prop.squaredNorm()) / (2.0 * priors_.sigma2_beta);

  res.log_ratio = lr;
  res.proposal = prop;
  accept_.proposed["beta"]++;
  if (!std::isfinite(lr)) {
    if (std::isnan(lr)) accept_.nonfinite_rejections++;
    return res;
  }
  if (std::log(rng_.uniform()) < lr) {
    beta_ = prop;
    lin_pred_ = lin;
    res.accepted = true;
    accept_.accepted["beta"]++;
  }
  return res;
}

Sampler::StepResult Sampler::step_theta() {
  StepResult res;
  const double scale = step_scale("theta");
  Eigen::VectorXd prop = theta_;
  for (int k = 0; k < k_; ++k) prop(k) += scale * rng_.normal();

  Eigen::VectorXd phi(big_n_);
  for (int s = 0; s < big_n_; ++s) phi(s) = prop(labels_[s]);
  double lr = total_loglik(lin_pred_, phi) - total_loglik(lin_pred_, phi_);
  lr += 0.5 * tau_s_ * (theta_.squaredNorm() - prop.squaredNorm());

  res.log_ratio = lr;
  res.proposal = prop;
  accept_.proposed["theta"]++;
  if (!std::isfinite(lr)) {
    if (std::isnan(lr)) accept_.nonfinite_rejections++;
    return res;
  }
  if (std::log(rng_.uniform()) < lr) {
    theta_ = prop;
    phi_ = phi;
    res.accepted = true;
    accept_.accepted["theta"]++;
  }
  return res;
}

std::vector<Sampler::StepResult> Sampler::step_gamma() {
  std::vector<StepResult> results;
  results.reserve(big_n_);
  const double scale = step_scale("gamma");
  const auto& precision = cov_.precision();
  for (int s = 0; s < big_n_; ++s) {
    StepResult res;
    const double prop = gamma_(s) + scale * rng_.normal();
    const double sd = cov_.marginal_sd(s);
    const double cdf = normal_cdf(prop / sd);
    const int label = label_from_cdf(cdf, weights_);
    const double delta = prop - gamma_(s);
    const double dquad =
        delta * delta * precision.coeff(s, s) + 2.0 * delta * precision_gamma_(s);
    double lr = site_loglik(s, theta_(label)) - site_loglik(s, theta_(labels_[s]));
    lr -= 0.5 * dquad;

    res.log_ratio = lr;
    res.proposal = Eigen::VectorXd::Constant(1, prop);
    accept_.proposed["gamma"]++;
    if (!std::isfinite(lr)) {
      if (std::isnan(lr)) accept_.nonfinite_rejections++;
      results.push_back(std::move(res));
      continue;
    }
    if (std::log(rng_.uniform()) < lr) {
      gamma_(s) = prop;
      cdf_(s) = cdf;
      labels_[s] = label;
      phi_(s) = theta_(label);
      precision_gamma_ += delta * precision.col(s);
      quad_ += dquad;
      res.accepted = true;
      accept_.accepted["gamma"]++;
    }
    results.push_back(std::move(res));
  }
  return results;
}

Sampler::StepResult Sampler::step_sticks() {
  StepResult res;
  if (k_ < 2) return res;
  const double scale = step_scale("sticks");

  std::vector<double> prop(sticks_);
  double lr = 0.0;
  for (int k = 0; k + 1 < k_; ++k) {
    const double x = logit(sticks_[k]) + scale * rng_.normal();
    prop[k] = inv_logit(x);
    // Beta(1, alpha) prior with the logit Jacobian V(1-V)
    lr += priors_.dp_alpha * (std::log1p(-prop[k]) - std::log1p(-sticks_[k])) +
          std::log(prop[k]) - std::log(sticks_[k]);
  }
  res.proposal = Eigen::Map<Eigen::VectorXd>(prop.data(), k_);
  accept_.proposed["sticks"]++;
  if (!std::isfinite(lr)) {
    // a stick hit 0 or 1 in floating point; reject
    res.log_ratio = lr;
    return res;
  }

  const auto weights = weights_from_sticks(prop);
  std::vector<int> labels(big_n_);
  for (int s = 0; s < big_n_; ++s) labels[s] = label_from_cdf(cdf_(s), weights);

  if (!config_.no_likelihood) {
    for (int s = 0; s < big_n_; ++s) {
      if (labels[s] != labels_[s]) {
        lr += site_loglik(s, theta_(labels[s])) - site_loglik(s, theta_(labels_[s]));
      }
    }
  }
  res.log_ratio = lr;
  if (!std::isfinite(lr)) {
    if (std::isnan(lr)) accept_.nonfinite_rejections++;
    return res;
  }
  if (std::log(rng_.uniform()) < lr) {
    sticks_ = prop;
    weights_ = weights;
    labels_ = labels;
    for (int s = 0; s < big_n_; ++s) phi_(s) = theta_(labels_[s]);
    res.accepted = true;
    accept_.accepted["sticks"]++;
  }
  return res;
}

void Sampler::step_tau() {
  // Gamma(a_s + K/2, rate b_s + sum theta^2 / 2), conjugate to the atoms
  tau_s_ = rng_.gamma(priors_.a_s + 0.5 * k_, priors_.b_s + 0.5 * theta_.squaredNorm());
}

Sampler::StepResult Sampler::step_rho() {
  StepResult res;
  const double scale = step_scale("rho");
  Eigen::VectorXd prop(q_);
  double jac = 0.0;
  for (int d = 0; d < q_; ++d) {
    const double x = logit(rho_(d)) + scale * rng_.normal();
    prop(d) = clamp_open(inv_logit(x), 0.0, 1.0);
    jac += std::log(prop(d)) + std::log1p(-prop(d)) - std::log(rho_(d)) -
           std::log1p(-rho_(d));
  }
  res.proposal = prop;
  accept_.proposed["rho"]++;

  auto dagars = std::make_shared<std::vector<DagarPrecision>>(build_dagars(prop, eta_));
  GammaCovariance cov = build_cov(std::move(dagars));
  const double quad_prop = cov.quad_form(gamma_);
  const double lr = 0.5 * (cov.log_det_precision() - quad_prop) -
                    0.5 * (cov_.log_det_precision() - quad_) + jac;
  res.log_ratio = lr;
  if (!std::isfinite(lr)) {
    if (std::isnan(lr)) accept_.nonfinite_rejections++;
    return res;
  }
  if (std::log(rng_.uniform()) < lr) {
    rho_ = prop;
    install_cov(std::move(cov));
    res.accepted = true;
    accept_.accepted["rho"]++;
  }
  return res;
}

Sampler::StepResult Sampler::step_eta() {
  StepResult res;
  if (eta_dim_ == 0) return res;
  const double scale = step_scale("eta");
  Eigen::VectorXd prop(eta_dim_);
  double jac = 0.0;
  for (int d = 0; d < q_; ++d) {
    for (int r = 0; r < eta_max_[d].size(); ++r) {
      const int idx = eta_offsets_[d] + r;
      const double m = eta_max_[d](r);
      const double x0 = std::log(eta_(idx)) - std::log(m - eta_(idx));
      const double x = x0 + scale * rng_.normal();
      prop(idx) = clamp_open(m * inv_logit(x), 0.0, m);
      jac += log_logistic_jacobian(x) - log_logistic_jacobian(x0);
    }
  }
  res.proposal = prop;
  accept_.proposed["eta"]++;

  auto dagars = std::make_shared<std::vector<DagarPrecision>>(build_dagars(rho_, prop));
  GammaCovariance cov = build_cov(std::move(dagars));
  const double lr = 0.5 * (cov.log_det_precision() - cov.quad_form(gamma_)) -
                    0.5 * (cov_.log_det_precision() - quad_) + jac;
  res.log_ratio = lr;
  if (!std::isfinite(lr)) {
    if (std::isnan(lr)) accept_.nonfinite_rejections++;
    return res;
  }
  if (std::log(rng_.uniform()) < lr) {
    eta_ = prop;
    install_cov(std::move(cov));
    res.accepted = true;
    accept_.accepted["eta"]++;
  }
  return res;
}

double Sampler::log_prior_a(const Eigen::MatrixXd& a) const {
  // inverse-Wishart on AA' in terms of the Cholesky factor, including the
  // transformation Jacobian 2^q prod_d a_dd^{q-d+1} (1-based d)
  const Eigen::MatrixXd inv_a =
      a.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(q_, q_));
  const double trace_term = (inv_a * priors_.wishart_psi * inv_a.transpose()).trace();
  double lp = -0.5 * trace_term + q_ * std::log(2.0);
  for (int d = 0; d < q_; ++d) {
    lp += -(priors_.wishart_nu + q_ + 1.0) * std::log(a(d, d)) +
          (q_ - d) * std::log(a(d, d));
  }
  return lp;
}

Sampler::StepResult Sampler::step_cross() {
  StepResult res;
  switch (disease_.variant) {
    case DiseaseVariant::unstructured: {
      const double scale = step_scale("cross");
      Eigen::MatrixXd prop = cross_.a_lower;
      double jac = 0.0;
      for (int d = 0; d < q_; ++d) {
        for (int h = 0; h <= d; ++h) {
          if (h == d) {
            // log-scale walk keeps the diagonal positive
            prop(d, d) = std::exp(std::log(prop(d, d)) + scale * rng_.normal());
            jac += std::log(prop(d, d)) - std::log(cross_.a_lower(d, d));
          } else {
            prop(d, h) += scale * rng_.normal();
          }
        }
      }
      res.proposal.resize(q_ * (q_ + 1) / 2);
      int idx = 0;
      for (int d = 0; d < q_; ++d) {
        for (int h = 0; h <= d; ++h) res.proposal(idx++) = prop(d, h);
      }
      accept_.proposed["cross"]++;

      GammaCovariance cov =
          build_cov(cov_.dagars(), CrossDiseaseParams::unstructured(prop));
      const double lr = 0.5 * (cov.log_det_precision() - cov.quad_form(gamma_)) -
                        0.5 * (cov_.log_det_precision() - quad_) +
                        log_prior_a(prop) - log_prior_a(cross_.a_lower) + jac;
      res.log_ratio = lr;
      if (!std::isfinite(lr)) {
        if (std::isnan(lr)) accept_.nonfinite_rejections++;
        return res;
      }
      if (std::log(rng_.uniform()) < lr) {
        cross_.a_lower = prop;
        install_cov(std::move(cov));
        res.accepted = true;
        accept_.accepted["cross"]++;
      }
      return res;
    }
    case DiseaseVariant::directed: {
      // Exact Gaussian full-conditional draw for each disease's pairs.
      std::vector<double> flat;
      for (int d = 0; d < q_; ++d) {
        const auto& parents = disease_.parents[d];
        if (parents.empty()) continue;
        const int dim = 2 * static_cast<int>(parents.size());
        Eigen::MatrixXd delta(n_, dim);
        for (std::size_t kp = 0; kp < parents.size(); ++kp) {
          const int h = parents[kp];
          const Eigen::VectorXd gh = gamma_.segment(h * n_, n_);
          delta.col(2 * kp) = gh;
          delta.col(2 * kp + 1) = geo_adjacency_ * gh;
        }
        const auto& qd = cov_.dagar(d).matrix();
        Eigen::MatrixXd prec = delta.transpose() * (qd * delta);
        prec.diagonal().array() += 1.0 / priors_.alpha_var;
        Eigen::VectorXd lin = delta.transpose() * (qd * gamma_.segment(d * n_, n_));
        lin.array() += priors_.alpha_mean / priors_.alpha_var;
        Eigen::LLT<Eigen::MatrixXd> llt(prec);
        if (llt.info() != Eigen::Success) {
          throw std::runtime_error(
              "step_cross: singular full-conditional precision (ill-conditioned delta)");
        }
        const Eigen::VectorXd mean = llt.solve(lin);
        Eigen::VectorXd zv(dim);
        for (int j = 0; j < dim; ++j) zv(j) = rng_.normal();
        Eigen::VectorXd draw = zv;
        llt.matrixU().solveInPlace(draw);  // cov of U^{-1} z is (LL')^{-1}
        draw += mean;
        for (std::size_t kp = 0; kp < parents.size(); ++kp) {
          cross_.alpha0[d][kp] = draw(2 * kp);
          cross_.alpha1[d][kp] = draw(2 * kp + 1);
          flat.push_back(draw(2 * kp));
          flat.push_back(draw(2 * kp + 1));
        }
      }
      install_cov(build_cov(cov_.dagars()));
      res.accepted = true;
      res.log_ratio = 0.0;
      res.proposal =
          Eigen::Map<Eigen::VectorXd>(flat.data(), static_cast<int>(flat.size()));
      accept_.proposed["cross"]++;
      accept_.accepted["cross"]++;
      return res;
    }
    case DiseaseVariant::undirected: {
      const auto [lo, hi] = disease_.rho_bounds();
      const double scale = step_scale("rho_dis");
      const double x0 = std::log(cross_.rho_dis - lo) - std::log(hi - cross_.rho_dis);
      const double x = x0 + scale * rng_.normal();
      const double prop = clamp_open(lo + (hi - lo) * inv_logit(x), lo, hi);
      res.proposal = Eigen::VectorXd::Constant(1, prop);
      accept_.proposed["cross"]++;

      GammaCovariance cov =
          build_cov(cov_.dagars(), CrossDiseaseParams::undirected(prop));
      const double lr = 0.5 * (cov.log_det_precision() - cov.quad_form(gamma_)) -
                        0.5 * (cov_.log_det_precision() - quad_) +
                        log_logistic_jacobian(x) - log_logistic_jacobian(x0);
      res.log_ratio = lr;
      if (!std::isfinite(lr)) {
        if (std::isnan(lr)) accept_.nonfinite_rejections++;
        return res;
      }
      if (std::log(rng_.uniform()) < lr) {
        cross_.rho_dis = prop;
        install_cov(std::move(cov));
        res.accepted = true;
        accept_.accepted["cross"]++;
      }
      return res;
    }
  }
  return res;
}

void Sampler::iterate(int iter) {
  auto target_for = [&](int dim) {
    return dim > 1 ? config_.target_multivariate : config_.target_scalar;
  };

  if (p_ > 0) {
    const auto r = step_beta();
    adapt("beta", r.log_ratio, iter, target_for(q_ * p_));
  }
  {
    const auto r = step_theta();
    adapt("theta", r.log_ratio, iter, target_for(k_));
  }
  step_gamma();  // fixed step size, never adapted
  if (k_ >= 2) {
    const auto r = step_sticks();
    adapt("sticks", r.log_ratio, iter, target_for(k_ - 1));
  }
  step_tau();
  {
    const auto r = step_rho();
    adapt("rho", r.log_ratio, iter, target_for(q_));
  }
  if (eta_dim_ > 0) {
    const auto r = step_eta();
    adapt("eta", r.log_ratio, iter, target_for(eta_dim_));
  }
  switch (disease_.variant) {
    case DiseaseVariant::unstructured:
    case DiseaseVariant::directed:
      step_cross();  // A walks with a fixed scale; directed draws are exact
      break;
    case DiseaseVariant::undirected: {
      const auto r = step_cross();
      adapt("rho_dis", r.log_ratio, iter, config_.target_scalar);
      break;
    }
  }
}

void Sampler::record(PosteriorSamples& out, int row) const {
  out.beta.row(row) = beta_.transpose();
  out.theta.row(row) = theta_.transpose();
  out.tau_s(row) = tau_s_;
  for (int k = 0; k < k_; ++k) out.sticks(row, k) = sticks_[k];
  out.gamma.row(row) = gamma_.transpose();
  out.rho.row(row) = rho_.transpose();
  if (eta_dim_ > 0) out.eta.row(row) = eta_.transpose();
  out.phi.row(row) = phi_.transpose();
  out.labels[row] = labels_;
  switch (disease_.variant) {
    case DiseaseVariant::unstructured: {
      int idx = 0;
      for (int d = 0; d < q_; ++d) {
        for (int h = 0; h <= d; ++h) out.cross(row, idx++) = cross_.a_lower(d, h);
      }
      break;
    }
    case DiseaseVariant::directed: {
      int idx = 0;
      for (int d = 0; d < q_; ++d) {
        for (std::size_t kp = 0; kp < disease_.parents[d].size(); ++kp) {
          out.cross(row, idx++) = cross_.alpha0[d][kp];
          out.cross(row, idx++) = cross_.alpha1[d][kp];
        }
      }
      break;
    }
    case DiseaseVariant::undirected:
      out.cross(row, 0) = cross_.rho_dis;
      break;
  }
}

PosteriorSamples Sampler::run() {
  PosteriorSamples out;
  out.n = n_;
  out.q = q_;
  out.p = p_;
  out.truncation = k_;
  out.variant = disease_.variant;
  out.kept = config_.retained();
  out.eta_offsets = eta_offsets_;

  int cross_dim = 0;
  switch (disease_.variant) {
    case DiseaseVariant::unstructured: {
      cross_dim = q_ * (q_ + 1) / 2;
      for (int d = 0; d < q_; ++d) {
        for (int h = 0; h <= d; ++h) {
          out.cross_names.push_back("a_" + std::to_string(d + 1) + "_" +
                                    std::to_string(h + 1));
        }
      }
      break;
    }
    case DiseaseVariant::directed: {
      for (int d = 0; d < q_; ++d) {
        for (int h : disease_.parents[d]) {
          out.cross_names.push_back("alpha0_" + std::to_string(d + 1) + "_" +
                                    std::to_string(h + 1));
          out.cross_names.push_back("alpha1_" + std::to_string(d + 1) + "_" +
                                    std::to_string(h + 1));
          cross_dim += 2;
        }
      }
      break;
    }
    case DiseaseVariant::undirected:
      cross_dim = 1;
      out.cross_names.push_back("rho_dis");
      break;
  }

  const int kept = out.kept;
  out.beta.resize(kept, q_ * p_);
  out.theta.resize(kept, k_);
  out.tau_s.resize(kept);
  out.sticks.resize(kept, k_);
  out.gamma.resize(kept, big_n_);
  out.rho.resize(kept, q_);
  out.eta.resize(kept, eta_dim_);
  out.cross.resize(kept, cross_dim);
  out.phi.resize(kept, big_n_);
  out.labels.assign(kept, {});

  int row = 0;
  for (int iter = 0; iter < config_.iterations; ++iter) {
    iterate(iter);
    if (iter >= config_.burnin && (iter - config_.burnin) % config_.thin == 0 &&
        row < kept) {
      record(out, row);
      ++row;
    }
  }
  out.accept = accept_;
  for (const auto& [block, unused] : log_scale_) {
    out.final_steps[block] = step_scale(block);
  }
  return out;
}

void Sampler::set_gamma(const Eigen::VectorXd& gamma) {
  if (gamma.size() != big_n_) throw std::invalid_argument("set_gamma: wrong length");
  gamma_ = gamma;
  precision_gamma_ = cov_.precision() * gamma_;
  quad_ = gamma_.dot(precision_gamma_);
  // a test hook, so re-derive the full site state from the new field
  for (int s = 0; s < big_n_; ++s) {
    cdf_(s) = normal_cdf(gamma_(s) / cov_.marginal_sd(s));
  }
  refresh_labels();
}

void Sampler::set_rho(const Eigen::VectorXd& rho) {
  if (rho.size() != q_) throw std::invalid_argument("set_rho: wrong length");
  rho_ = rho;
  auto dagars = std::make_shared<std::vector<DagarPrecision>>(build_dagars(rho_, eta_));
  install_cov(build_cov(std::move(dagars)));
}

void Sampler::set_cross(const CrossDiseaseParams& params) {
  cross_ = params;
  install_cov(build_cov(cov_.dagars()));
}

PosteriorSamples run_chain(const ObservedData& data, const RegionGraph& graph,
                           const DiseaseGraphSpec& disease, const PriorSpec& priors,
                           const ChainConfig& config) {
  Sampler sampler(data, graph, disease, priors, config);
  return sampler.run();
}

}  // namespace womble
