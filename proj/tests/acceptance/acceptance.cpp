// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. The CLI binary path is taken as argv[1] and used by the
// determinism criterion.

#include <boost/math/distributions/gamma.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "../support.hpp"
#include "womble/boundary.hpp"
#include "womble/diagnostics.hpp"
#include "womble/disease_cov.hpp"
#include "womble/io.hpp"
#include "womble/sampler.hpp"
#include "womble/simgen.hpp"
#include "womble/spatial_dp.hpp"

using namespace womble;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int id;
  std::string name;
  bool pass;
  std::string detail;
  double seconds;
};

std::vector<Outcome> outcomes;

template <typename Fn>
void criterion(int id, const std::string& name, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out{id, name, false, "", 0.0};
  try {
    out.detail = fn(out.pass);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  outcomes.push_back(out);
  std::printf("%s criterion %2d: %s (%s; %.1fs)\n", out.pass ? "PASS" : "FAIL", id,
              name.c_str(), out.detail.c_str(), out.seconds);
  std::fflush(stdout);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. precision-matrix exactness

std::string run_c1(bool& pass) {
  Rng rng(1001);
  double worst = 0.0;
  double min_eigen = 1e300;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform() * 7);
    const auto g = test::random_graph(rng, n, 0.5);
    EdgeDissimilarity z(1);
    for (int i = 0; i < n; ++i) {
      for (int j : g.preceding_neighbors(i)) {
        z.set(i, j, Eigen::VectorXd::Constant(1, rng.uniform(0.0, 2.0)));
      }
    }
    const Eigen::VectorXd eta = Eigen::VectorXd::Constant(1, rng.uniform(0.0, 1.5));
    const auto w = adjacency_from_eta(g, z, eta);
    const double rho = rng.uniform(0.0, 0.999);
    DagarPrecision p(g, w, rho);
    worst = std::max(worst,
                     test::max_rel_diff(Eigen::MatrixXd(p.matrix()),
                                        test::dense_dagar(w, rho)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(p.matrix())};
    min_eigen = std::min(min_eigen, es.eigenvalues().minCoeff());
  }
  pass = worst <= 1e-12 && min_eigen > 0.0;
  return "max rel err " + fmt(worst) + ", min eigenvalue " + fmt(min_eigen);
}

// ---------------------------------------------------------------------------
// 2. covariance-assembly oracle

std::string run_c2(bool& pass) {
  Rng rng(2002);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 3 + static_cast<int>(rng.uniform() * 4);
    const int q = 2 + static_cast<int>(rng.uniform() * 2);
    const auto g = test::random_graph(rng, n, 0.55);
    auto dagars = std::make_shared<std::vector<DagarPrecision>>();
    std::vector<Eigen::MatrixXd> q_dense;
    for (int d = 0; d < q; ++d) {
      dagars->emplace_back(g, test::random_adjacency(rng, g, 0.85),
                           rng.uniform(0.0, 0.95));
      q_dense.emplace_back(dagars->back().matrix());
    }
    {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(q, q);
      for (int d = 0; d < q; ++d) {
        a(d, d) = rng.uniform(0.2, 2.0);
        for (int h = 0; h < d; ++h) a(d, h) = rng.normal();
      }
      const auto cov = GammaCovariance::unstructured(a, dagars);
      worst = std::max(worst,
                       test::max_rel_diff(Eigen::MatrixXd(cov.precision()).inverse(),
                                          test::dense_sigma_unstructured(a, q_dense)));
    }
    {
      std::vector<std::vector<int>> parents(q);
      std::vector<std::vector<double>> a0(q), a1(q);
      for (int d = 1; d < q; ++d) {
        for (int h = 0; h < d; ++h) {
          if (rng.uniform() < 0.7) {
            parents[d].push_back(h);
            a0[d].push_back(rng.normal());
            a1[d].push_back(rng.normal());
          }
        }
      }
      const auto spec = DiseaseGraphSpec::make_directed(q, parents);
      const auto cov = GammaCovariance::directed(spec, a0, a1,
                                                 geographic_adjacency(g), dagars);
      worst = std::max(
          worst, test::max_rel_diff(
                     Eigen::MatrixXd(cov.precision()).inverse(),
                     test::dense_sigma_directed(spec, a0, a1, dense_adjacency(g),
                                                q_dense)));
    }
    {
      Eigen::MatrixXd w = Eigen::MatrixXd::Zero(q, q);
      for (int a = 0; a < q; ++a) {
        const int b = (a + 1) % q;
        w(a, b) = w(b, a) = 1.0;
      }
      const auto spec = DiseaseGraphSpec::make_undirected(w);
      const auto [lo, hi] = spec.rho_bounds();
      const double rho_dis = rng.uniform(0.9 * lo, 0.9 * hi);
      const auto cov = GammaCovariance::undirected(rho_dis, spec, dagars);
      worst = std::max(
          worst,
          test::max_rel_diff(Eigen::MatrixXd(cov.precision()),
                             test::dense_precision_undirected(rho_dis, spec, q_dense)));
    }
  }
  pass = worst <= 1e-9;
  return "max rel err " + fmt(worst) + " over 150 assemblies";
}

// ---------------------------------------------------------------------------
// 3. DP covariance law

std::string run_c3(bool& pass) {
  Rng rng(3003);
  const auto g = test::random_graph(rng, 6, 0.6, false);
  auto dagars = std::make_shared<std::vector<DagarPrecision>>();
  dagars->emplace_back(g, full_preceding_adjacency(g), 0.7);
  dagars->emplace_back(g, full_preceding_adjacency(g), 0.3);
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.0, 0.6, 0.9;
  const auto cov = GammaCovariance::unstructured(a, dagars);

  DpPriors priors;
  priors.a_s = 2.0;
  priors.b_s = 1.0;
  priors.alpha = 1.0;
  priors.truncation = 6;

  const std::vector<std::pair<int, int>> pairs{{0, 0}, {0, 1}, {2, 5}, {1, 7}, {3, 9}};
  pass = true;
  double worst_sigma = 0.0;
  for (const auto& pr : pairs) {
    const auto res = prior_cov_oracle(cov, priors, pr, 100000, rng);
    const double gap = std::abs(res.mc_cov - res.semianalytic);
    const double sigmas = gap / std::max(res.diff_se, 1e-12);
    worst_sigma = std::max(worst_sigma, sigmas);
    if (gap > 3.0 * res.diff_se + 1e-9) pass = false;
  }
  return "worst discrepancy " + fmt(worst_sigma) + " paired SEs over 5 pairs";
}

// ---------------------------------------------------------------------------
// 4. prior recovery

struct PriorRun {
  PosteriorSamples samples;
  std::vector<Eigen::VectorXd> eta_max;
};

PriorRun no_likelihood_run(DiseaseVariant variant, std::uint64_t seed) {
  const auto g = lattice_map(3, 3, 9);
  const int q = 2;
  Rng rng(seed);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(9, q);
  EdgeDissimilarity z(1);
  for (int i = 0; i < 9; ++i) {
    for (int j : g.preceding_neighbors(i)) {
      z.set(i, j, Eigen::VectorXd::Constant(1, rng.uniform(0.2, 2.0)));
    }
  }
  ObservedData data = ObservedData::intercept_only(9, q, y, {z, z});
  DiseaseGraphSpec disease;
  if (variant == DiseaseVariant::unstructured) {
    disease = DiseaseGraphSpec::make_unstructured(q);
  } else {
    Eigen::MatrixXd w(2, 2);
    w << 0, 1, 1, 0;
    disease = DiseaseGraphSpec::make_undirected(w);
  }
  ChainConfig config;
  config.no_likelihood = true;
  config.truncation = 5;
  config.thin = 5;            // the latent-field block moves slowly
  config.step_gamma = 0.8;    // prior-scale steps mix the field faster
  config.burnin = 2000;
  config.iterations = config.burnin + 5000 * config.thin;
  config.seed = seed;
  Sampler sampler(data, g, disease, PriorSpec::defaults(q), config);
  PriorRun run;
  run.eta_max = sampler.eta_bounds();
  run.samples = sampler.run();
  return run;
}

std::string run_c4(bool& pass) {
  const auto unstructured = no_likelihood_run(DiseaseVariant::unstructured, 4004);
  const auto undirected = no_likelihood_run(DiseaseVariant::undirected, 4005);
  const int kept = unstructured.samples.kept;

  double worst = 0.0;
  std::string worst_name = "-";
  const auto check = [&](const std::string& name, std::vector<double> draws,
                         const std::function<double(double)>& cdf) {
    const double d = test::ks_distance(std::move(draws), cdf);
    if (d > worst) {
      worst = d;
      worst_name = name;
    }
  };

  {
    const auto& s = unstructured.samples;
    boost::math::gamma_distribution<double> tau_prior(2.0, 1.0);  // shape, scale
    std::vector<double> tau(kept);
    for (int t = 0; t < kept; ++t) tau[t] = s.tau_s(t);
    check("tau_s", tau, [&](double x) { return boost::math::cdf(tau_prior, x); });
    for (int d = 0; d < 2; ++d) {
      std::vector<double> rho(kept);
      for (int t = 0; t < kept; ++t) rho[t] = s.rho(t, d);
      check("rho_" + std::to_string(d + 1), rho,
            [](double x) { return std::min(1.0, std::max(0.0, x)); });
      const double m = unstructured.eta_max[d](0);
      std::vector<double> eta(kept);
      for (int t = 0; t < kept; ++t) eta[t] = s.eta(t, d);
      check("eta_" + std::to_string(d + 1), eta, [m](double x) {
        return std::min(1.0, std::max(0.0, x / m));
      });
    }
  }
  {
    const auto& s = undirected.samples;
    std::vector<double> rho_dis(s.kept);
    for (int t = 0; t < s.kept; ++t) rho_dis[t] = s.cross(t, 0);
    check("rho_dis", rho_dis,
          [](double x) { return std::min(1.0, std::max(0.0, (x + 1.0) / 2.0)); });
    std::vector<double> tau(s.kept);
    for (int t = 0; t < s.kept; ++t) tau[t] = s.tau_s(t);
    boost::math::gamma_distribution<double> tau_prior(2.0, 1.0);
    check("tau_s (undirected)", tau,
          [&](double x) { return boost::math::cdf(tau_prior, x); });
  }
  pass = worst < 0.05;
  return "worst KS " + fmt(worst) + " (" + worst_name + ") at 5000 retained draws";
}

// ---------------------------------------------------------------------------
// 5. directed conjugate oracle

std::string run_c5(bool& pass) {
  RegionGraph g(3, {{0, 1}, {1, 2}});
  Rng rng(5005);
  Eigen::MatrixXd y(3, 2);
  for (int i = 0; i < 3; ++i) {
    for (int d = 0; d < 2; ++d) y(i, d) = static_cast<double>(rng.poisson(2.0));
  }
  ObservedData data = ObservedData::intercept_only(3, 2, y);
  const auto disease = DiseaseGraphSpec::make_directed(2, {{}, {0}});
  ChainConfig config;
  config.seed = 555;
  PriorSpec priors = PriorSpec::defaults(2);
  Sampler sampler(data, g, disease, priors, config);
  sampler.set_rho((Eigen::VectorXd(2) << 0.3, 0.7).finished());
  Eigen::VectorXd gamma(6);
  gamma << 0.7, -1.1, 0.4, 1.3, 0.2, -0.8;
  sampler.set_gamma(gamma);

  // closed-form Gaussian full conditional of the coefficient pair
  const Eigen::MatrixXd qd(sampler.covariance().dagar(1).matrix());
  const Eigen::MatrixXd geo = dense_adjacency(g);
  Eigen::MatrixXd delta(3, 2);
  delta.col(0) = gamma.segment(0, 3);
  delta.col(1) = geo * gamma.segment(0, 3);
  Eigen::MatrixXd prec = delta.transpose() * qd * delta;
  prec.diagonal().array() += 1.0 / priors.alpha_var;
  const Eigen::MatrixXd cov_exact = prec.inverse();
  const Eigen::VectorXd mean_exact = cov_exact * (delta.transpose() * qd *
                                                  gamma.segment(3, 3));

  const int draws = 50000;
  Eigen::MatrixXd collected(draws, 2);
  for (int t = 0; t < draws; ++t) {
    collected.row(t) = sampler.step_cross().proposal.transpose();
  }
  const Eigen::RowVectorXd mean_emp = collected.colwise().mean();
  const Eigen::MatrixXd centered = collected.rowwise() - mean_emp;
  const Eigen::MatrixXd cov_emp =
      centered.transpose() * centered / static_cast<double>(draws - 1);

  pass = true;
  double worst_z = 0.0;
  for (int j = 0; j < 2; ++j) {
    const double se = std::sqrt(cov_exact(j, j) / draws);
    const double zscore = std::abs(mean_emp(j) - mean_exact(j)) / se;
    worst_z = std::max(worst_z, zscore);
    if (zscore > 3.0) pass = false;
  }
  const double frob = (cov_emp - cov_exact).norm() / cov_exact.norm();
  if (frob > 0.05) pass = false;
  return "worst mean z " + fmt(worst_z) + ", covariance Frobenius gap " + fmt(frob);
}

// ---------------------------------------------------------------------------
// 6 and 8. boundary recovery and FDR control at desk scale

std::string run_c6_c8(bool& pass6, bool& pass8, std::string& detail8) {
  const auto g = lattice_map(6, 10, 58);
  SimScenario scenario = SimScenario::reference(DiseaseVariant::unstructured);
  scenario.seed = 66001;
  scenario.replicates = 5;
  const auto sim = generate(scenario, g);

  std::vector<std::vector<char>> truth(4);
  for (int d = 0; d < 4; ++d) truth[d] = true_boundaries(sim, g, ProbeKind::single, d);

  Eigen::MatrixXd sens = Eigen::MatrixXd::Zero(5, 4);
  std::vector<double> realized_fdr;
  for (int rep = 0; rep < 5; ++rep) {
    ObservedData data =
        ObservedData::intercept_only(58, 4, sim.counts[rep], sim.z);
    ChainConfig config;
    config.iterations = 5000;
    config.burnin = 2500;
    config.thin = 1;
    config.truncation = 15;
    config.seed = 7000 + rep;
    const auto samples = run_chain(data, g, scenario.disease,
                                   PriorSpec::defaults(4), config);
    for (int d = 0; d < 4; ++d) {
      const auto probe = boundary_probs(samples, g, ProbeKind::single, d);
      sens(rep, d) = score_against_truth(probe, truth[d], 110).sensitivity;
      const auto curve = select_threshold(probe, 0.05);
      realized_fdr.push_back(truth_fdr(curve.selected, truth[d]));
    }
  }

  const Eigen::RowVectorXd mean_sens = sens.colwise().mean();
  pass6 = true;
  for (int d = 0; d < 4; ++d) {
    if (mean_sens(d) < 0.70) pass6 = false;
  }
  if (mean_sens(1) < 0.85) pass6 = false;  // disease 2 carries rho = 0.8

  const double mean_fdr = test::mean_of(realized_fdr);
  pass8 = mean_fdr <= 0.10;
  detail8 = "mean realized FDR " + fmt(mean_fdr) + " at zeta 0.05 over 20 selections";

  std::string detail = "mean sensitivity at T=110:";
  for (int d = 0; d < 4; ++d) detail += " " + fmt(mean_sens(d));
  return detail;
}

// ---------------------------------------------------------------------------
// 7. FDR arithmetic oracle

std::string run_c7(bool& pass) {
  Rng rng(7007);
  pass = true;
  long checks = 0;
  for (int rep = 0; rep < 1000 && pass; ++rep) {
    const int m = 1 + static_cast<int>(rng.uniform() * 30);
    BoundaryProbe probe;
    probe.m = m;
    probe.v.resize(m);
    for (int e = 0; e < m; ++e) {
      probe.v(e) = rng.uniform() < 0.25 ? std::round(rng.uniform() * 5.0) / 5.0
                                        : rng.uniform();
      probe.edges.emplace_back(e, e + 1);
    }
    const double zeta = rng.uniform(0.01, 0.5);

    // brute force over every distinct threshold value
    std::vector<double> distinct(probe.v.data(), probe.v.data() + m);
    std::sort(distinct.begin(), distinct.end(), std::greater<double>());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    int best_count = 0;
    double best_t = 0.0;
    const auto curve = select_threshold(probe, zeta);
    if (curve.steps.size() != distinct.size()) pass = false;
    for (std::size_t k = 0; k < distinct.size() && pass; ++k) {
      const double w = distinct[k];
      double bad = 0.0, kept_v = 0.0;
      int count = 0;
      for (int e = 0; e < m; ++e) {
        if (probe.v(e) >= w) {
          bad += 1.0 - probe.v(e);
          kept_v += probe.v(e);
          ++count;
        }
      }
      const double fdr = bad / count;
      const double fnr =
          count == m ? 0.0 : (probe.v.sum() - kept_v) / static_cast<double>(m - count);
      if (curve.steps[k].t != w || curve.steps[k].selected != count ||
          curve.steps[k].fdr != fdr || curve.steps[k].fnr != fnr) {
        pass = false;
      }
      if (fdr <= zeta && count > best_count) {
        best_count = count;
        best_t = w;
      }
      ++checks;

      // the pointwise estimators at a threshold just below w
      const double t_probe = w - 1e-12;
      double fdr_ref = 0.0, fnr_ref = 0.0;
      int sel = 0;
      for (int e = 0; e < m; ++e) {
        if (probe.v(e) > t_probe) {
          fdr_ref += 1.0 - probe.v(e);
          ++sel;
        } else {
          fnr_ref += probe.v(e);
        }
      }
      const auto fdr_est = fdr_estimate(probe, t_probe);
      if (!fdr_est || *fdr_est != fdr_ref / sel) pass = false;
      const auto fnr_est = fnr_estimate(probe, t_probe);
      if (sel == m) {
        if (fnr_est) pass = false;
      } else if (!fnr_est || *fnr_est != fnr_ref / (m - sel)) {
        pass = false;
      }
    }
    if (best_count == 0) {
      if (curve.t_star || curve.selected_count() != 0) pass = false;
    } else if (!curve.t_star || *curve.t_star != best_t ||
               curve.selected_count() != best_count) {
      pass = false;
    }
  }
  return std::to_string(checks) + " threshold evaluations compared exactly";
}

// ---------------------------------------------------------------------------
// 9. WAIC direction

std::string run_c9(bool& pass) {
  const auto g = lattice_map(4, 5, 20);
  const int replicates = 10;
  const std::vector<DiseaseVariant> variants{DiseaseVariant::unstructured,
                                             DiseaseVariant::directed,
                                             DiseaseVariant::undirected};
  // wins[g][a] = replicates where the generating variant g beats fit a.
  // The count scale is brought down from the boundary-recovery scenario so
  // that all ninety chains converge inside the run budget; a structural
  // comparison is meaningless on unconverged fits.
  int wins[3][3] = {};
  double mean_waic[3][3] = {};
  for (int gi = 0; gi < 3; ++gi) {
    for (int rep = 0; rep < replicates; ++rep) {
      SimScenario scenario = SimScenario::reference(variants[gi]);
      scenario.beta = (Eigen::VectorXd(4) << -1.0, 1.5, 0.75, -0.5).finished();
      scenario.tau_s = 0.5;
      scenario.seed = 9400 + 97 * gi + rep;
      scenario.replicates = 1;
      const auto sim = generate(scenario, g);
      ObservedData data = ObservedData::intercept_only(20, 4, sim.counts[0], sim.z);
      double waic_by_fit[3];
      for (int fi = 0; fi < 3; ++fi) {
        const SimScenario shape = SimScenario::reference(variants[fi]);
        ChainConfig config;
        config.iterations = 12000;
        config.burnin = 6000;
        config.truncation = 15;
        config.seed = 91000 + 7 * rep + gi;  // common across the three fits
        const auto samples = run_chain(data, g, shape.disease,
                                       PriorSpec::defaults(4), config);
        waic_by_fit[fi] = waic(pointwise_loglik(samples, data)).waic;
        mean_waic[gi][fi] += waic_by_fit[fi] / replicates;
      }
      for (int fi = 0; fi < 3; ++fi) {
        if (fi != gi && waic_by_fit[gi] < waic_by_fit[fi]) wins[gi][fi]++;
      }
    }
  }
  pass = true;
  std::string detail = "per-pair wins of 10:";
  const char* tags[3] = {"unstructured", "directed", "undirected"};
  for (int gi = 0; gi < 3; ++gi) {
    for (int fi = 0; fi < 3; ++fi) {
      if (fi == gi) continue;
      detail += std::string(" ") + tags[gi] + ">" + tags[fi] + "=" +
                std::to_string(wins[gi][fi]);
      if (wins[gi][fi] < 7) pass = false;
    }
  }
  detail += "; mean WAIC rows";
  for (int gi = 0; gi < 3; ++gi) {
    detail += " [";
    for (int fi = 0; fi < 3; ++fi) {
      detail += (fi ? " " : "") + fmt(mean_waic[gi][fi]);
    }
    detail += "]";
  }
  return detail;
}

// ---------------------------------------------------------------------------
// 10. multivariate ESS sanity

std::string run_c10(bool& pass) {
  Rng rng(1010);
  const int draws = 100000;
  Eigen::MatrixXd iid(draws, 4);
  for (int i = 0; i < draws; ++i) {
    for (int j = 0; j < 4; ++j) iid(i, j) = rng.normal();
  }
  const double ess_iid = multivariate_ess(iid).ess;
  const double iid_err = std::abs(ess_iid - draws) / draws;

  Eigen::MatrixXd ar(draws, 1);
  double state = 0.0;
  for (int i = 0; i < draws; ++i) {
    state = 0.9 * state + rng.normal();
    ar(i, 0) = state;
  }
  const double expected = draws * (1.0 - 0.9) / (1.0 + 0.9);
  const double ess_ar = multivariate_ess(ar).ess;
  const double ar_err = std::abs(ess_ar - expected) / expected;

  pass = iid_err <= 0.10 && ar_err <= 0.20;
  return "iid ESS/B " + fmt(ess_iid / draws) + ", AR(1) ESS/analytic " +
         fmt(ess_ar / expected);
}

// ---------------------------------------------------------------------------
// 11. determinism of the CLI

bool same_file_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::ostringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str();
}

std::string run_c11(bool& pass, const std::string& cli) {
  const fs::path root = fs::temp_directory_path() / "womble_acceptance_det";
  fs::remove_all(root);
  fs::create_directories(root);

  const auto shell = [&](const std::string& cmd) {
    const std::string full = cmd + " > /dev/null 2>&1";
    if (std::system(full.c_str()) != 0) {
      throw std::runtime_error("command failed: " + cmd);
    }
  };

  for (const char* side : {"a", "b"}) {
    const fs::path dir = root / side;
    shell(cli + " simulate --rows 4 --cols 5 --regions 18 --replicates 1 --seed 4242" +
          " --out " + dir.string());
    // shorten the prepared chain so the determinism check stays quick
    RunConfig config = load_run_config(dir / "run.json");
    config.chain.iterations = 600;
    config.chain.burnin = 300;
    std::ofstream out(dir / "run.json");
    out << run_config_json(config).dump(2) << "\n";
    out.close();
    shell(cli + " validate --config " + (dir / "run.json").string());
    shell(cli + " fit --config " + (dir / "run.json").string());
    shell(cli + " detect --config " + (dir / "run.json").string());
    shell(cli + " diagnose --config " + (dir / "run.json").string());
  }

  long files = 0;
  pass = true;
  std::string first_diff;
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), root / "a");
    ++files;
    if (!same_file_bytes(entry.path(), root / "b" / rel)) {
      pass = false;
      if (first_diff.empty()) first_diff = rel.string();
    }
  }
  fs::remove_all(root);
  if (!pass) return "differs: " + first_diff;
  return std::to_string(files) + " output files byte-identical across reruns";
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";

  criterion(1, "precision-matrix exactness", [](bool& pass) { return run_c1(pass); });
  criterion(2, "covariance-assembly oracle", [](bool& pass) { return run_c2(pass); });
  criterion(3, "DP covariance law", [](bool& pass) { return run_c3(pass); });
  criterion(4, "prior recovery", [](bool& pass) { return run_c4(pass); });
  criterion(5, "directed conjugate oracle", [](bool& pass) { return run_c5(pass); });

  bool pass8 = false;
  std::string detail8 = "did not run";
  criterion(6, "boundary recovery at desk scale", [&](bool& pass) {
    return run_c6_c8(pass, pass8, detail8);
  });
  criterion(7, "FDR arithmetic oracle", [](bool& pass) { return run_c7(pass); });
  {
    Outcome out{8, "FDR control on truth", pass8, detail8, 0.0};
    outcomes.push_back(out);
    std::printf("%s criterion %2d: %s (%s; with criterion 6)\n",
                out.pass ? "PASS" : "FAIL", out.id, out.name.c_str(),
                out.detail.c_str());
  }
  criterion(9, "WAIC direction", [](bool& pass) { return run_c9(pass); });
  criterion(10, "multivariate ESS sanity", [](bool& pass) { return run_c10(pass); });
  if (cli.empty()) {
    std::printf("FAIL criterion 11: determinism (CLI binary path not supplied)\n");
    outcomes.push_back({11, "determinism", false, "no CLI path", 0.0});
  } else {
    criterion(11, "CLI determinism", [&](bool& pass) { return run_c11(pass, cli); });
  }

  int failures = 0;
  for (const auto& out : outcomes) {
    if (!out.pass) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(outcomes.size()) - failures,
              outcomes.size());
  return failures == 0 ? 0 : 1;
}
