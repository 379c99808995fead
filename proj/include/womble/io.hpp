#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "womble/boundary.hpp"
#include "womble/data.hpp"
#include "womble/region_graph.hpp"
#include "womble/sampler.hpp"
#include "womble/simgen.hpp"

#include <json.hpp>

namespace womble {

/// Age-sex (or other) strata: counts and populations per region, disease and
/// group, used to standardize expected counts.
struct StrataData {
  int n = 0, q = 0, groups = 0;
  // cases[k](i, d), population[k](i) for group k
  std::vector<Eigen::MatrixXd> cases;
  std::vector<Eigen::VectorXd> population;
};

/// E_id = sum_k c_d^k N_i^k with c_d^k the pooled incidence rate of group k.
Eigen::MatrixXd expected_counts(const StrataData& strata);

struct ProbeSpec {
  ProbeKind kind = ProbeKind::single;
  int d = 0, dprime = -1;  // 0-based
  std::string label() const;
};

struct RunConfig {
  int schema_version = 1;
  std::filesystem::path base_dir;  // directory of the config file
  // data files
  std::string edges_path;
  std::string counts_path;
  std::vector<std::string> dissimilarity_paths;  // per disease; may be empty
  std::string covariates_path;  // optional
  std::string strata_path;      // optional
  std::string centroids_path;   // optional
  std::vector<int> order;       // optional topological order, 0-based
  bool intercept = true;
  // model
  DiseaseGraphSpec disease;
  PriorSpec priors;
  ChainConfig chain;
  // detection
  std::vector<ProbeSpec> probes;  // empty = all standard probes
  double zeta = 0.05;
  double adjacency_cutoff = 0.5;
  // diagnostics
  std::vector<double> moran_bins;
  std::string output_dir = "out";

  std::filesystem::path resolve(const std::string& rel) const;
  std::vector<ProbeSpec> effective_probes() const;
};

RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json run_config_json(const RunConfig& config);

struct IngestReport {
  long counts_rows = 0;
  long dissimilarity_rows = 0;
  std::vector<std::string> notes;
};

struct Dataset {
  RegionGraph graph;
  ObservedData data;
  IngestReport report;
};

Dataset ingest(const RunConfig& config);

// individual readers
std::pair<int, std::vector<std::pair<int, int>>> read_edge_list(
    const std::filesystem::path& path);
std::vector<std::array<double, 2>> read_centroids(const std::filesystem::path& path,
                                                  int n);
StrataData read_strata(const std::filesystem::path& path, int n, int q);

/// FNV-1a hash of the canonical manifest text; stamped on every output file.
std::string manifest_hash(const nlohmann::json& manifest);

void write_samples(const std::filesystem::path& dir, const PosteriorSamples& samples,
                   const nlohmann::json& manifest);
PosteriorSamples read_samples(const std::filesystem::path& dir);
nlohmann::json read_manifest(const std::filesystem::path& dir);

void write_boundary_report(const std::filesystem::path& path,
                           const std::vector<ProbeSpec>& probes,
                           const std::vector<BoundaryProbe>& results,
                           const std::vector<FdrCurve>& curves,
                           const std::string& hash);
void write_fdr_curves(const std::filesystem::path& path,
                      const std::vector<ProbeSpec>& probes,
                      const std::vector<FdrCurve>& curves, const std::string& hash);
void write_adjacency_report(const std::filesystem::path& path,
                            const AdjacencyDetection& detection,
                            const std::string& hash);

/// Write one simulated scenario in the same formats `ingest` reads, plus the
/// latent truth and a ready-to-run fit configuration.
void write_simulation(const std::filesystem::path& dir, const SimScenario& scenario,
                      const SimOutput& out, const RegionGraph& g);

}  // namespace womble
