// Command-line front end: simulate / fit / detect / diagnose / validate.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "womble/boundary.hpp"
#include "womble/diagnostics.hpp"
#include "womble/io.hpp"
#include "womble/region_graph.hpp"
#include "womble/sampler.hpp"
#include "womble/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace womble;

namespace {

int fail(const std::string& stage, const std::string& message) {
  json err;
  err["error"] = message;
  err["stage"] = stage;
  std::cerr << err.dump() << std::endl;
  return 1;
}

json fit_manifest(const RunConfig& config, const Sampler& sampler,
                  const PosteriorSamples& samples,
                  const std::vector<std::string>& design_names,
                  const std::vector<int>& order) {
  json m;
  m["command"] = "fit";
  m["schema_version"] = 1;
  m["variant"] = samples.variant == DiseaseVariant::unstructured ? "unstructured"
                 : samples.variant == DiseaseVariant::directed   ? "directed"
                                                                 : "undirected";
  m["n"] = samples.n;
  m["q"] = samples.q;
  m["p"] = samples.p;
  m["truncation"] = samples.truncation;
  m["kept"] = samples.kept;
  m["seed"] = config.chain.seed;
  m["iterations"] = config.chain.iterations;
  m["burnin"] = config.chain.burnin;
  m["thin"] = config.chain.thin;
  m["design_names"] = design_names;
  m["eta_offsets"] = samples.eta_offsets;
  m["cross_names"] = samples.cross_names;
  std::vector<int> order_1based;
  for (int v : order) order_1based.push_back(v + 1);
  m["order"] = order_1based;
  json eta_max = json::array();
  for (const auto& bounds : sampler.eta_bounds()) {
    std::vector<double> v(bounds.data(), bounds.data() + bounds.size());
    eta_max.push_back(v);
  }
  m["eta_max"] = eta_max;
  json acc;
  for (const auto& [block, count] : samples.accept.proposed) {
    acc[block] = samples.accept.rate(block);
  }
  m["acceptance"] = acc;
  m["nonfinite_rejections"] = samples.accept.nonfinite_rejections;
  m["final_steps"] = samples.final_steps;
  m["config"] = run_config_json(config);
  m["manifest_hash"] = "";
  m["manifest_hash"] = manifest_hash(m);
  return m;
}

int cmd_simulate(const std::string& variant_name, int rows, int cols, int keep,
                 int replicates, std::uint64_t seed, const std::string& out_dir,
                 const std::string& edges_file) {
  SimScenario scenario = SimScenario::reference(
      variant_name == "directed"     ? DiseaseVariant::directed
      : variant_name == "undirected" ? DiseaseVariant::undirected
                                     : DiseaseVariant::unstructured);
  scenario.seed = seed;
  scenario.replicates = replicates;
  RegionGraph g = edges_file.empty()
                      ? lattice_map(rows, cols, keep)
                      : [&] {
                          auto [n, edges] = read_edge_list(edges_file);
                          return RegionGraph(n, std::move(edges));
                        }();
  const SimOutput out = generate(scenario, g);
  write_simulation(out_dir, scenario, out, g);
  std::cout << "simulated " << g.size() << " regions, " << scenario.disease.q
            << " diseases, " << replicates << " replicate(s) -> " << out_dir
            << std::endl;
  return 0;
}

int cmd_fit(const std::string& config_path) {
  const RunConfig config = load_run_config(config_path);
  Dataset dataset = ingest(config);
  Sampler sampler(dataset.data, dataset.graph, config.disease, config.priors,
                  config.chain);
  const PosteriorSamples samples = sampler.run();
  const json manifest = fit_manifest(config, sampler, samples,
                                     dataset.data.design_names,
                                     dataset.graph.order());
  const fs::path out_dir = config.resolve(config.output_dir) / "samples";
  write_samples(out_dir, samples, manifest);
  std::cout << "fit: " << samples.kept << " retained draws -> " << out_dir.string()
            << std::endl;
  for (const auto& [block, unused] : samples.accept.proposed) {
    std::cout << "  accept[" << block << "] = " << samples.accept.rate(block)
              << std::endl;
  }
  return 0;
}

int cmd_detect(const std::string& config_path, const std::string& samples_dir) {
  const RunConfig config = load_run_config(config_path);
  Dataset dataset = ingest(config);
  const fs::path dir = samples_dir.empty()
                           ? config.resolve(config.output_dir) / "samples"
                           : fs::path(samples_dir);
  const PosteriorSamples samples = read_samples(dir);
  const std::string hash = read_manifest(dir).at("manifest_hash");

  const auto probes = config.effective_probes();
  std::vector<BoundaryProbe> results;
  std::vector<FdrCurve> curves;
  for (const auto& p : probes) {
    results.push_back(boundary_probs(samples, dataset.graph, p.kind, p.d, p.dprime));
    curves.push_back(select_threshold(results.back(), config.zeta));
    if (!curves.back().t_star) {
      std::cerr << "warning: no threshold satisfies the FDR budget for "
                << p.label() << "; empty selection" << std::endl;
    }
  }
  const fs::path out_dir = config.resolve(config.output_dir);
  write_boundary_report(out_dir / "boundary.csv", probes, results, curves, hash);
  write_fdr_curves(out_dir / "fdr_curves.csv", probes, curves, hash);
  if (!dataset.data.z.empty()) {
    const AdjacencyDetection det = adjacency_detection(
        samples, dataset.graph, dataset.data.z, config.adjacency_cutoff);
    write_adjacency_report(out_dir / "adjacency.csv", det, hash);
  }
  std::cout << "detect: " << probes.size() << " probes -> " << out_dir.string()
            << std::endl;
  return 0;
}

int cmd_diagnose(const std::string& config_path, const std::string& samples_dir) {
  const RunConfig config = load_run_config(config_path);
  Dataset dataset = ingest(config);
  const fs::path dir = samples_dir.empty()
                           ? config.resolve(config.output_dir) / "samples"
                           : fs::path(samples_dir);
  const PosteriorSamples samples = read_samples(dir);
  const std::string hash = read_manifest(dir).at("manifest_hash");

  json report;
  report["manifest_hash"] = hash;
  report["kept_draws"] = samples.kept;

  const WaicResult w = waic(pointwise_loglik(samples, dataset.data));
  report["waic"] = {{"waic", w.waic}, {"lppd", w.lppd}, {"p_waic", w.p_waic}};

  // chain quality on the top-level block: beta, tau_s, theta
  const int pcols = static_cast<int>(samples.beta.cols()) + 1 +
                    static_cast<int>(samples.theta.cols());
  Eigen::MatrixXd block(samples.kept, pcols);
  block.leftCols(samples.beta.cols()) = samples.beta;
  block.col(samples.beta.cols()) = samples.tau_s;
  block.rightCols(samples.theta.cols()) = samples.theta;
  const EssResult ess = multivariate_ess(block);
  const int used = pcols - static_cast<int>(ess.dropped.size());
  report["ess"] = {{"value", ess.ess},
                   {"parameters", used},
                   {"batch_size", ess.batch_size},
                   {"batches", ess.batches},
                   {"precision_level", ess_precision(used, 0.05, ess.ess)},
                   {"min_ess_05", min_ess(used, 0.05, 0.05)}};
  json mcse;
  {
    std::vector<std::string> names;
    for (int d = 0; d < samples.q; ++d) {
      for (int c = 0; c < samples.p; ++c) {
        names.push_back("beta_d" + std::to_string(d + 1) + "_c" + std::to_string(c + 1));
      }
    }
    names.push_back("tau_s");
    for (int k = 0; k < samples.truncation; ++k) {
      names.push_back("theta_" + std::to_string(k + 1));
    }
    int kept_col = 0;
    for (int c = 0; c < pcols; ++c) {
      if (std::find(ess.dropped.begin(), ess.dropped.end(), c) != ess.dropped.end()) {
        continue;
      }
      mcse[names[c]] = ess.mcse(kept_col++);
    }
  }
  report["mcse"] = mcse;

  // exploratory summaries of the standardized incidence ratios
  Eigen::MatrixXd sir = dataset.data.y.array() / dataset.data.expected.array();
  report["pearson_sir"] = json::array();
  {
    const Eigen::MatrixXd corr = pearson_matrix(sir);
    for (int a = 0; a < corr.rows(); ++a) {
      std::vector<double> row(corr.cols());
      for (int b = 0; b < corr.cols(); ++b) row[b] = corr(a, b);
      report["pearson_sir"].push_back(row);
    }
  }
  if (!config.moran_bins.empty() && dataset.graph.has_centroids()) {
    const auto orders = rth_order_neighbors(dataset.graph, config.moran_bins);
    json morans = json::array();
    for (std::size_t r = 0; r < orders.size(); ++r) {
      json row;
      row["order"] = r + 1;
      row["pairs"] = orders[r].size();
      json per_disease = json::array();
      for (int d = 0; d < dataset.data.q; ++d) {
        per_disease.push_back(orders[r].empty() ? json()
                                                : json(morans_i(sir.col(d), orders[r])));
      }
      row["morans_i"] = per_disease;
      morans.push_back(row);
    }
    report["morans"] = morans;
  }

  const fs::path out_path = config.resolve(config.output_dir) / "diagnostics.json";
  std::ofstream out(out_path);
  out << report.dump(2) << "\n";
  std::cout << "diagnose: WAIC " << w.waic << ", multivariate ESS " << ess.ess
            << " -> " << out_path.string() << std::endl;
  return 0;
}

int cmd_validate(const std::string& config_path) {
  const RunConfig config = load_run_config(config_path);
  const Dataset dataset = ingest(config);
  std::cout << "valid: " << dataset.graph.size() << " regions, "
            << dataset.graph.edge_count() << " edges, " << dataset.data.q
            << " diseases, " << dataset.report.counts_rows << " count cells"
            << std::endl;
  for (const auto& note : dataset.report.notes) std::cout << "  " << note << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multivariate disease-map difference-boundary detection"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "generate a synthetic scenario");
  std::string sim_variant = "unstructured";
  int sim_rows = 6, sim_cols = 10, sim_keep = 58, sim_reps = 1;
  std::uint64_t sim_seed = 20240101;
  std::string sim_out = "sim";
  std::string sim_edges;
  sim->add_option("--variant", sim_variant, "unstructured | directed | undirected");
  sim->add_option("--rows", sim_rows, "lattice rows");
  sim->add_option("--cols", sim_cols, "lattice columns");
  sim->add_option("--regions", sim_keep, "regions kept from the lattice");
  sim->add_option("--edges", sim_edges, "use this edge list instead of the lattice");
  sim->add_option("--replicates", sim_reps, "count replicates sharing one field");
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--out", sim_out, "output directory");

  std::string config_path, samples_dir;
  auto* fit = app.add_subcommand("fit", "run the MCMC sampler");
  fit->add_option("--config", config_path, "run configuration JSON")->required();
  auto* detect = app.add_subcommand("detect", "boundary and adjacency detection");
  detect->add_option("--config", config_path, "run configuration JSON")->required();
  detect->add_option("--samples", samples_dir, "sample store directory");
  auto* diagnose = app.add_subcommand("diagnose", "model comparison and chain quality");
  diagnose->add_option("--config", config_path, "run configuration JSON")->required();
  diagnose->add_option("--samples", samples_dir, "sample store directory");
  auto* validate = app.add_subcommand("validate", "schema-check a configuration");
  validate->add_option("--config", config_path, "run configuration JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      return cmd_simulate(sim_variant, sim_rows, sim_cols, sim_keep, sim_reps,
                          sim_seed, sim_out, sim_edges);
    }
    if (fit->parsed()) return cmd_fit(config_path);
    if (detect->parsed()) return cmd_detect(config_path, samples_dir);
    if (diagnose->parsed()) return cmd_diagnose(config_path, samples_dir);
    if (validate->parsed()) return cmd_validate(config_path);
  } catch (const std::exception& e) {
    return fail(app.get_subcommands().front()->get_name(), e.what());
  }
  return 1;
}
