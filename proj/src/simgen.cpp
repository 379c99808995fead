#include "womble/simgen.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "womble/rng.hpp"
#include "womble/spatial_dp.hpp"

namespace womble {

SimScenario SimScenario::reference(DiseaseVariant variant) {
  SimScenario s;
  const int q = 4;
  switch (variant) {
    case DiseaseVariant::unstructured:
      s.disease = DiseaseGraphSpec::make_unstructured(q);
      s.a_lower = Eigen::MatrixXd::Zero(q, q);
      s.a_lower.triangularView<Eigen::Lower>().setConstant(1.0);
      break;
    case DiseaseVariant::directed: {
      s.disease = DiseaseGraphSpec::make_directed(q, {{}, {0}, {1}, {0, 2}});
      s.alpha0 = {{}, {0.3}, {0.4}, {0.5, 0.8}};
      s.alpha1 = {{}, {0.5}, {0.4}, {0.4, 0.1}};
      break;
    }
    case DiseaseVariant::undirected: {
      Eigen::MatrixXd w = Eigen::MatrixXd::Zero(q, q);
      const int cycle[4][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
      for (auto [a, b] : cycle) {
        w(a, b) = 1.0;
        w(b, a) = 1.0;
      }
      s.disease = DiseaseGraphSpec::make_undirected(w);
      s.rho_dis = 0.25;
      break;
    }
  }
  s.beta = (Eigen::VectorXd(q) << -2.0, 2.0, 1.0, -1.0).finished();
  s.rho = (Eigen::VectorXd(q) << 0.2, 0.8, 0.4, 0.6).finished();
  s.eta = (Eigen::VectorXd(q) << 0.5, 0.25, 0.33, 0.6).finished();
  return s;
}

SimOutput generate(const SimScenario& scenario, const RegionGraph& g) {
  const int n = g.size();
  const int q = scenario.disease.q;
  if (scenario.beta.size() != q || scenario.rho.size() != q ||
      scenario.eta.size() != q) {
    throw std::invalid_argument("generate: parameter vectors must have length q");
  }
  if (scenario.replicates < 1) {
    throw std::invalid_argument("generate: need at least one replicate");
  }
  Rng rng(scenario.seed);
  SimOutput out;

  // regional covariate and standardized absolute differences on edges
  out.region_covariate.resize(n);
  for (int i = 0; i < n; ++i) {
    out.region_covariate(i) =
        rng.normal(scenario.covariate_mean, scenario.covariate_sd);
  }
  double sum = 0.0, sum2 = 0.0;
  for (auto [a, b] : g.edges()) {
    const double diff = std::abs(out.region_covariate(a) - out.region_covariate(b));
    sum += diff;
    sum2 += diff * diff;
  }
  const double m = static_cast<double>(g.edge_count());
  out.z_scale = std::sqrt((sum2 - sum * sum / m) / (m - 1.0));
  if (out.z_scale <= 0.0) throw std::runtime_error("generate: degenerate covariate");

  EdgeDissimilarity z(1);
  for (int i = 0; i < n; ++i) {
    for (int j : g.preceding_neighbors(i)) {
      const double diff =
          std::abs(out.region_covariate(i) - out.region_covariate(j)) / out.z_scale;
      z.set(i, j, Eigen::VectorXd::Constant(1, diff));
    }
  }
  out.z.assign(q, z);

  // per-disease adjacency and DAGAR precisions
  auto dagars = std::make_shared<std::vector<DagarPrecision>>();
  dagars->reserve(q);
  out.w_true.reserve(q);
  for (int d = 0; d < q; ++d) {
    PrecAdjacency w =
        adjacency_from_eta(g, z, Eigen::VectorXd::Constant(1, scenario.eta(d)));
    out.w_true.push_back(w);
    dagars->emplace_back(g, std::move(w), scenario.rho(d));
  }

  CrossDiseaseParams cross;
  switch (scenario.disease.variant) {
    case DiseaseVariant::unstructured:
      cross = CrossDiseaseParams::unstructured(scenario.a_lower);
      break;
    case DiseaseVariant::directed:
      cross = CrossDiseaseParams::directed(scenario.alpha0, scenario.alpha1);
      break;
    case DiseaseVariant::undirected:
      cross = CrossDiseaseParams::undirected(scenario.rho_dis);
      break;
  }
  const GammaCovariance cov = GammaCovariance::build(
      cross, scenario.disease, geographic_adjacency(g), dagars);

  // one latent field shared by all replicates
  out.gamma = cov.sample(rng);

  const int k = scenario.truncation;
  out.sticks.resize(k);
  for (int j = 0; j + 1 < k; ++j) out.sticks(j) = rng.beta1(scenario.dp_alpha);
  out.sticks(k - 1) = 1.0;
  std::vector<double> sticks(out.sticks.data(), out.sticks.data() + k);
  const auto weights = weights_from_sticks(sticks);
  out.weights = Eigen::Map<const Eigen::VectorXd>(weights.data(), k);

  const double atom_sd = 1.0 / std::sqrt(scenario.tau_s);
  out.atoms.resize(k);
  for (int j = 0; j < k; ++j) out.atoms(j) = rng.normal(0.0, atom_sd);

  const int big_n = n * q;
  out.labels.resize(big_n);
  out.phi.resize(big_n);
  for (int s = 0; s < big_n; ++s) {
    out.labels[s] = label_from_gamma(out.gamma(s), cov.marginal_sd(s), weights);
    out.phi(s) = out.atoms(out.labels[s]);
  }

  out.expected = Eigen::MatrixXd::Constant(n, q, scenario.expected_count);
  out.counts.reserve(scenario.replicates);
  for (int r = 0; r < scenario.replicates; ++r) {
    Eigen::MatrixXd y(n, q);
    for (int d = 0; d < q; ++d) {
      for (int i = 0; i < n; ++i) {
        const double rate = out.expected(i, d) *
                            std::exp(scenario.beta(d) + out.phi(d * n + i));
        y(i, d) = static_cast<double>(rng.poisson(rate));
      }
    }
    out.counts.push_back(std::move(y));
  }
  return out;
}

std::vector<char> true_boundaries(const SimOutput& out, const RegionGraph& g,
                                  ProbeKind kind, int d, int dprime) {
  const int n = g.size();
  std::vector<char> flags;
  flags.reserve(g.edges().size());
  const auto& u = out.labels;
  for (auto [i, j] : g.edges()) {
    bool hit = false;
    switch (kind) {
      case ProbeKind::single:
        hit = u[d * n + i] != u[d * n + j];
        break;
      case ProbeKind::cross:
      case ProbeKind::mutual:
        hit = u[d * n + i] != u[dprime * n + j] && u[dprime * n + i] != u[d * n + j];
        break;
      case ProbeKind::shared:
        hit = u[d * n + i] != u[d * n + j] && u[dprime * n + i] != u[dprime * n + j];
        break;
    }
    flags.push_back(hit ? 1 : 0);
  }
  return flags;
}

RegionGraph lattice_map(int rows, int cols, int keep) {
  if (keep < 1 || keep > rows * cols) {
    throw std::invalid_argument("lattice_map: keep out of range");
  }
  std::vector<std::pair<int, int>> edges;
  auto idx = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int a = idx(r, c);
      if (a >= keep) continue;
      if (c + 1 < cols && idx(r, c + 1) < keep) edges.emplace_back(a, idx(r, c + 1));
      if (r + 1 < rows && idx(r + 1, c) < keep) edges.emplace_back(a, idx(r + 1, c));
      if (r + 1 < rows && c + 1 < cols && idx(r + 1, c + 1) < keep) {
        edges.emplace_back(a, idx(r + 1, c + 1));
      }
    }
  }
  RegionGraph g(keep, std::move(edges));
  std::vector<std::array<double, 2>> xy(keep);
  for (int a = 0; a < keep; ++a) {
    xy[a] = {static_cast<double>(a % cols) + 0.5 * ((a / cols) % 2),
             0.866 * static_cast<double>(a / cols)};
  }
  g.set_centroids(std::move(xy));
  return g;
}

}  // namespace womble
