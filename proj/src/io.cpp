#include "womble/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace womble {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto a = field.find_first_not_of(" \t\r");
    const auto b = field.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

/// Rows of a CSV file after validating the exact header. Lines starting with
/// '#' and blank lines are skipped.
std::vector<std::vector<std::string>> read_csv(const fs::path& path,
                                               const std::string& header) {
  auto in = open_input(path);
  std::string line;
  bool header_seen = false;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != header) {
        throw std::runtime_error(path.string() + ": expected header '" + header +
                                 "', found '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    rows.push_back(split_csv(line));
  }
  if (!header_seen) throw std::runtime_error(path.string() + ": missing header");
  return rows;
}

int to_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("bad " + what + ": '" + s + "'");
  }
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("bad " + what + ": '" + s + "'");
  }
}

void write_matrix_csv(const fs::path& path, const std::vector<std::string>& names,
                      const Eigen::MatrixXd& values, const std::string& hash) {
  auto out = open_output(path);
  out << "# manifest=" << hash << "\n";
  for (std::size_t c = 0; c < names.size(); ++c) {
    out << (c ? "," : "") << names[c];
  }
  out << "\n";
  for (int r = 0; r < values.rows(); ++r) {
    for (int c = 0; c < values.cols(); ++c) {
      out << (c ? "," : "") << fmt(values(r, c));
    }
    out << "\n";
  }
}

Eigen::MatrixXd read_matrix_csv(const fs::path& path, int expected_cols) {
  auto in = open_input(path);
  std::string line;
  bool header_seen = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto fields = split_csv(line);
    std::vector<double> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      row[c] = to_double(fields[c], "sample value");
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd out(static_cast<int>(rows.size()), expected_cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (static_cast<int>(rows[r].size()) != expected_cols) {
      throw std::runtime_error(path.string() + ": column count mismatch");
    }
    for (int c = 0; c < expected_cols; ++c) out(static_cast<int>(r), c) = rows[r][c];
  }
  return out;
}

std::string variant_name(DiseaseVariant v) {
  switch (v) {
    case DiseaseVariant::unstructured: return "unstructured";
    case DiseaseVariant::directed: return "directed";
    case DiseaseVariant::undirected: return "undirected";
  }
  return "?";
}

DiseaseVariant variant_from_name(const std::string& s) {
  if (s == "unstructured") return DiseaseVariant::unstructured;
  if (s == "directed") return DiseaseVariant::directed;
  if (s == "undirected") return DiseaseVariant::undirected;
  throw std::runtime_error("unknown variant: " + s);
}

}  // namespace

Eigen::MatrixXd expected_counts(const StrataData& strata) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(strata.n, strata.q);
  for (int k = 0; k < strata.groups; ++k) {
    const double pop = strata.population[k].sum();
    for (int d = 0; d < strata.q; ++d) {
      const double cases = strata.cases[k].col(d).sum();
      if (cases > 0.0 && pop <= 0.0) {
        throw std::invalid_argument("expected_counts: group " + std::to_string(k + 1) +
                                    " has cases but zero population");
      }
      if (pop <= 0.0) continue;
      const double rate = cases / pop;
      e.col(d) += rate * strata.population[k];
    }
  }
  return e;
}

std::string ProbeSpec::label() const {
  std::string s = probe_name(kind) + "_d" + std::to_string(d + 1);
  if (kind != ProbeKind::single) s += "_d" + std::to_string(dprime + 1);
  return s;
}

std::filesystem::path RunConfig::resolve(const std::string& rel) const {
  const fs::path p(rel);
  return p.is_absolute() ? p : base_dir / p;
}

std::vector<ProbeSpec> RunConfig::effective_probes() const {
  if (!probes.empty()) return probes;
  std::vector<ProbeSpec> out;
  for (int d = 0; d < disease.q; ++d) out.push_back({ProbeKind::single, d, -1});
  for (int d = 0; d < disease.q; ++d) {
    for (int h = d + 1; h < disease.q; ++h) {
      out.push_back({ProbeKind::cross, d, h});
      out.push_back({ProbeKind::shared, d, h});
      out.push_back({ProbeKind::mutual, d, h});
    }
  }
  return out;
}

RunConfig load_run_config(const fs::path& path) {
  auto in = open_input(path);
  json j;
  in >> j;
  RunConfig c;
  c.base_dir = path.parent_path();
  c.schema_version = j.at("schema_version").get<int>();
  if (c.schema_version != 1) {
    throw std::runtime_error("unsupported config schema version");
  }

  const auto& data = j.at("data");
  c.edges_path = data.at("edges").get<std::string>();
  c.counts_path = data.at("counts").get<std::string>();
  if (data.contains("dissimilarity")) {
    c.dissimilarity_paths = data.at("dissimilarity").get<std::vector<std::string>>();
  }
  if (data.contains("covariates")) c.covariates_path = data.at("covariates");
  if (data.contains("strata")) c.strata_path = data.at("strata");
  if (data.contains("centroids")) c.centroids_path = data.at("centroids");
  if (data.contains("order")) {
    for (int pos : data.at("order").get<std::vector<int>>()) c.order.push_back(pos - 1);
  }
  if (data.contains("intercept")) c.intercept = data.at("intercept").get<bool>();

  const auto& model = j.at("model");
  const int q = model.at("diseases").get<int>();
  const auto variant = variant_from_name(model.at("variant").get<std::string>());
  switch (variant) {
    case DiseaseVariant::unstructured:
      c.disease = DiseaseGraphSpec::make_unstructured(q);
      break;
    case DiseaseVariant::directed: {
      std::vector<std::vector<int>> parents(q);
      const auto& par = model.at("parents");
      for (int d = 0; d < q; ++d) {
        for (int h : par.at(d).get<std::vector<int>>()) parents[d].push_back(h - 1);
      }
      c.disease = DiseaseGraphSpec::make_directed(q, std::move(parents));
      break;
    }
    case DiseaseVariant::undirected: {
      Eigen::MatrixXd w(q, q);
      const auto& rows = model.at("w_dis");
      for (int a = 0; a < q; ++a) {
        for (int b = 0; b < q; ++b) w(a, b) = rows.at(a).at(b).get<double>();
      }
      c.disease = DiseaseGraphSpec::make_undirected(std::move(w));
      break;
    }
  }

  c.priors = PriorSpec::defaults(q);
  if (j.contains("priors")) {
    const auto& pr = j.at("priors");
    if (pr.contains("sigma2_beta")) c.priors.sigma2_beta = pr.at("sigma2_beta");
    if (pr.contains("a_s")) c.priors.a_s = pr.at("a_s");
    if (pr.contains("b_s")) c.priors.b_s = pr.at("b_s");
    if (pr.contains("alpha")) c.priors.dp_alpha = pr.at("alpha");
    if (pr.contains("nu")) c.priors.wishart_nu = pr.at("nu");
    if (pr.contains("psi_diag")) {
      c.priors.wishart_psi =
          pr.at("psi_diag").get<double>() * Eigen::MatrixXd::Identity(q, q);
    }
    if (pr.contains("alpha_mean")) c.priors.alpha_mean = pr.at("alpha_mean");
    if (pr.contains("alpha_var")) c.priors.alpha_var = pr.at("alpha_var");
    if (pr.contains("eta_max")) {
      for (const auto& row : pr.at("eta_max")) {
        const auto vals = row.get<std::vector<double>>();
        c.priors.eta_max.emplace_back(
            Eigen::Map<const Eigen::VectorXd>(vals.data(), vals.size()));
      }
    }
  }

  if (j.contains("chain")) {
    const auto& ch = j.at("chain");
    if (ch.contains("iterations")) c.chain.iterations = ch.at("iterations");
    if (ch.contains("burnin")) c.chain.burnin = ch.at("burnin");
    if (ch.contains("thin")) c.chain.thin = ch.at("thin");
    if (ch.contains("truncation")) c.chain.truncation = ch.at("truncation");
    if (ch.contains("seed")) c.chain.seed = ch.at("seed").get<std::uint64_t>();
    if (ch.contains("steps")) {
      const auto& st = ch.at("steps");
      if (st.contains("beta")) c.chain.step_beta = st.at("beta");
      if (st.contains("theta")) c.chain.step_theta = st.at("theta");
      if (st.contains("v")) c.chain.step_v = st.at("v");
      if (st.contains("gamma")) c.chain.step_gamma = st.at("gamma");
      if (st.contains("rho")) c.chain.step_rho = st.at("rho");
      if (st.contains("eta")) c.chain.step_eta = st.at("eta");
      if (st.contains("a")) c.chain.step_a = st.at("a");
      if (st.contains("rho_dis")) c.chain.step_rho_dis = st.at("rho_dis");
    }
  }

  if (j.contains("detect")) {
    const auto& det = j.at("detect");
    if (det.contains("zeta")) c.zeta = det.at("zeta");
    if (det.contains("adjacency_cutoff")) c.adjacency_cutoff = det.at("adjacency_cutoff");
    if (det.contains("probes")) {
      for (const auto& pj : det.at("probes")) {
        ProbeSpec p;
        p.kind = probe_from_name(pj.at("kind").get<std::string>());
        p.d = pj.at("d").get<int>() - 1;
        if (pj.contains("dprime")) p.dprime = pj.at("dprime").get<int>() - 1;
        c.probes.push_back(p);
      }
    }
  }
  if (j.contains("diagnostics") && j.at("diagnostics").contains("moran_bins")) {
    c.moran_bins = j.at("diagnostics").at("moran_bins").get<std::vector<double>>();
  }
  if (j.contains("output")) c.output_dir = j.at("output");
  if (c.zeta <= 0.0 || c.zeta >= 1.0) {
    throw std::runtime_error("config: zeta must lie in (0,1)");
  }
  return c;
}

nlohmann::json run_config_json(const RunConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  json data;
  data["edges"] = c.edges_path;
  data["counts"] = c.counts_path;
  data["dissimilarity"] = c.dissimilarity_paths;
  if (!c.covariates_path.empty()) data["covariates"] = c.covariates_path;
  if (!c.strata_path.empty()) data["strata"] = c.strata_path;
  if (!c.centroids_path.empty()) data["centroids"] = c.centroids_path;
  if (!c.order.empty()) {
    std::vector<int> ord;
    for (int v : c.order) ord.push_back(v + 1);
    data["order"] = ord;
  }
  data["intercept"] = c.intercept;
  j["data"] = data;

  json model;
  model["diseases"] = c.disease.q;
  model["variant"] = variant_name(c.disease.variant);
  if (c.disease.variant == DiseaseVariant::directed) {
    std::vector<std::vector<int>> parents(c.disease.q);
    for (int d = 0; d < c.disease.q; ++d) {
      for (int h : c.disease.parents[d]) parents[d].push_back(h + 1);
    }
    model["parents"] = parents;
  }
  if (c.disease.variant == DiseaseVariant::undirected) {
    std::vector<std::vector<double>> w(c.disease.q, std::vector<double>(c.disease.q));
    for (int a = 0; a < c.disease.q; ++a) {
      for (int b = 0; b < c.disease.q; ++b) w[a][b] = c.disease.w_dis(a, b);
    }
    model["w_dis"] = w;
  }
  j["model"] = model;

  json priors;
  priors["sigma2_beta"] = c.priors.sigma2_beta;
  priors["a_s"] = c.priors.a_s;
  priors["b_s"] = c.priors.b_s;
  priors["alpha"] = c.priors.dp_alpha;
  priors["nu"] = c.priors.wishart_nu;
  if (c.priors.wishart_psi.size() > 0) priors["psi_diag"] = c.priors.wishart_psi(0, 0);
  priors["alpha_mean"] = c.priors.alpha_mean;
  priors["alpha_var"] = c.priors.alpha_var;
  j["priors"] = priors;

  json chain;
  chain["iterations"] = c.chain.iterations;
  chain["burnin"] = c.chain.burnin;
  chain["thin"] = c.chain.thin;
  chain["truncation"] = c.chain.truncation;
  chain["seed"] = c.chain.seed;
  chain["steps"] = {{"beta", c.chain.step_beta},   {"theta", c.chain.step_theta},
                    {"v", c.chain.step_v},         {"gamma", c.chain.step_gamma},
                    {"rho", c.chain.step_rho},     {"eta", c.chain.step_eta},
                    {"a", c.chain.step_a},         {"rho_dis", c.chain.step_rho_dis}};
  j["chain"] = chain;

  json detect;
  detect["zeta"] = c.zeta;
  detect["adjacency_cutoff"] = c.adjacency_cutoff;
  j["detect"] = detect;
  if (!c.moran_bins.empty()) j["diagnostics"] = {{"moran_bins", c.moran_bins}};
  j["output"] = c.output_dir;
  return j;
}

std::pair<int, std::vector<std::pair<int, int>>> read_edge_list(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  std::vector<std::pair<int, int>> edges;
  int n = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    int a = 0, b = 0;
    if (!(ss >> a >> b)) throw std::runtime_error(path.string() + ": bad edge line");
    if (a < 1 || b < 1) throw std::runtime_error(path.string() + ": indices are 1-based");
    edges.emplace_back(a - 1, b - 1);
    n = std::max({n, a, b});
  }
  return {n, edges};
}

std::vector<std::array<double, 2>> read_centroids(const fs::path& path, int n) {
  const auto rows = read_csv(path, "region_id,x,y");
  std::vector<std::array<double, 2>> xy(n, {0.0, 0.0});
  std::vector<char> seen(n, 0);
  for (const auto& row : rows) {
    const int i = to_int(row.at(0), "region_id") - 1;
    if (i < 0 || i >= n) throw std::runtime_error("centroids: region out of range");
    if (seen[i]) throw std::runtime_error("centroids: duplicate region");
    seen[i] = 1;
    xy[i] = {to_double(row.at(1), "x"), to_double(row.at(2), "y")};
  }
  for (int i = 0; i < n; ++i) {
    if (!seen[i]) throw std::runtime_error("centroids: missing region " + std::to_string(i + 1));
  }
  return xy;
}

StrataData read_strata(const fs::path& path, int n, int q) {
  const auto rows = read_csv(path, "region_id,disease_id,group_id,cases,population");
  std::map<int, int> group_index;
  StrataData s;
  s.n = n;
  s.q = q;
  for (const auto& row : rows) {
    const int g = to_int(row.at(2), "group_id");
    if (!group_index.count(g)) {
      group_index[g] = static_cast<int>(group_index.size());
      s.cases.push_back(Eigen::MatrixXd::Zero(n, q));
      s.population.push_back(Eigen::VectorXd::Constant(n, -1.0));
    }
    const int k = group_index[g];
    const int i = to_int(row.at(0), "region_id") - 1;
    const int d = to_int(row.at(1), "disease_id") - 1;
    if (i < 0 || i >= n || d < 0 || d >= q) {
      throw std::runtime_error("strata: index out of range");
    }
    s.cases[k](i, d) = to_double(row.at(3), "cases");
    const double pop = to_double(row.at(4), "population");
    if (s.population[k](i) >= 0.0 && s.population[k](i) != pop) {
      throw std::runtime_error("strata: inconsistent population for region " +
                               std::to_string(i + 1));
    }
    s.population[k](i) = pop;
  }
  s.groups = static_cast<int>(s.cases.size());
  for (auto& pop : s.population) {
    pop = pop.cwiseMax(0.0);  // unmentioned (region, group) cells hold no people
  }
  return s;
}

Dataset ingest(const RunConfig& config) {
  IngestReport report;
  auto [n_edges, edges] = read_edge_list(config.resolve(config.edges_path));

  // counts establish n and q; the expected column is optional
  std::vector<std::vector<std::string>> count_rows;
  {
    auto in = open_input(config.resolve(config.counts_path));
    std::string line;
    bool header_seen = false, has_expected = false;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (!header_seen) {
        if (line == "region_id,disease_id,count,expected") {
          has_expected = true;
        } else if (line != "region_id,disease_id,count") {
          throw std::runtime_error(config.counts_path +
                                   ": expected header region_id,disease_id,count[,expected]");
        }
        header_seen = true;
        continue;
      }
      auto fields = split_csv(line);
      if (!has_expected) fields.push_back("");
      count_rows.push_back(std::move(fields));
    }
    if (!header_seen) throw std::runtime_error(config.counts_path + ": missing header");
  }
  int n = n_edges;
  const int q = config.disease.q;
  for (const auto& row : count_rows) {
    n = std::max(n, to_int(row.at(0), "region_id"));
  }
  RegionGraph graph(n, edges, config.order);

  ObservedData data;
  data.n = n;
  data.q = q;
  data.y = Eigen::MatrixXd::Constant(n, q, -1.0);
  data.expected = Eigen::MatrixXd::Zero(n, q);
  bool any_expected = false;
  for (const auto& row : count_rows) {
    const int i = to_int(row.at(0), "region_id") - 1;
    const int d = to_int(row.at(1), "disease_id") - 1;
    if (d < 0 || d >= q) throw std::runtime_error("counts: disease_id out of range");
    if (data.y(i, d) >= 0.0) {
      throw std::runtime_error("counts: duplicate cell (region " + std::to_string(i + 1) +
                               ", disease " + std::to_string(d + 1) + ")");
    }
    data.y(i, d) = to_double(row.at(2), "count");
    if (!row.at(3).empty()) {
      data.expected(i, d) = to_double(row.at(3), "expected");
      any_expected = true;
    }
    ++report.counts_rows;
  }
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < q; ++d) {
      if (data.y(i, d) < 0.0) {
        throw std::runtime_error("counts: missing cell (region " + std::to_string(i + 1) +
                                 ", disease " + std::to_string(d + 1) + ")");
      }
    }
  }
  if (!config.strata_path.empty()) {
    const StrataData strata = read_strata(config.resolve(config.strata_path), n, q);
    data.expected = expected_counts(strata);
    report.notes.push_back("expected counts standardized from " +
                           std::to_string(strata.groups) + " strata");
  } else if (!any_expected) {
    throw std::runtime_error(
        "counts: expected counts absent; supply the expected column or strata");
  }

  // design matrix
  std::vector<std::string> names;
  std::map<std::string, std::map<std::pair<int, int>, double>> values;
  if (!config.covariates_path.empty()) {
    const auto rows = read_csv(config.resolve(config.covariates_path),
                               "region_id,disease_id,name,value");
    for (const auto& row : rows) {
      const int i = to_int(row.at(0), "region_id") - 1;
      const int d = to_int(row.at(1), "disease_id");  // 0 means every disease
      const std::string& name = row.at(2);
      const double value = to_double(row.at(3), "value");
      if (std::find(names.begin(), names.end(), name) == names.end()) {
        names.push_back(name);
      }
      if (d == 0) {
        for (int dd = 0; dd < q; ++dd) values[name][{i, dd}] = value;
      } else {
        values[name][{i, d - 1}] = value;
      }
    }
    std::sort(names.begin(), names.end());
  }
  data.p = static_cast<int>(names.size()) + (config.intercept ? 1 : 0);
  if (data.p == 0) {
    throw std::runtime_error("config: no covariates and no intercept; empty design");
  }
  data.design.resize(n * q, data.p);
  int col = 0;
  if (config.intercept) {
    data.design.col(col).setOnes();
    data.design_names.push_back("intercept");
    ++col;
  }
  for (const auto& name : names) {
    const auto& cells = values.at(name);
    for (int d = 0; d < q; ++d) {
      for (int i = 0; i < n; ++i) {
        const auto it = cells.find({i, d});
        if (it == cells.end()) {
          throw std::runtime_error("covariates: missing value of '" + name +
                                   "' for region " + std::to_string(i + 1) +
                                   ", disease " + std::to_string(d + 1));
        }
        data.design(d * n + i, col) = it->second;
      }
    }
    data.design_names.push_back(name);
    ++col;
  }

  // per-disease dissimilarities
  if (!config.dissimilarity_paths.empty()) {
    if (static_cast<int>(config.dissimilarity_paths.size()) != q) {
      throw std::runtime_error("config: need one dissimilarity file per disease");
    }
    for (int d = 0; d < q; ++d) {
      auto in = open_input(config.resolve(config.dissimilarity_paths[d]));
      std::string line;
      bool header_seen = false;
      int dim = 0;
      std::optional<EdgeDissimilarity> z;
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_csv(line);
        if (!header_seen) {
          if (fields.size() < 3 || fields[0] != "i" || fields[1] != "j") {
            throw std::runtime_error("dissimilarity: header must be i,j,z1,...");
          }
          dim = static_cast<int>(fields.size()) - 2;
          z.emplace(dim);
          header_seen = true;
          continue;
        }
        const int a = to_int(fields.at(0), "i") - 1;
        const int b = to_int(fields.at(1), "j") - 1;
        // store under the later region in the topological order
        const int i = graph.position(a) > graph.position(b) ? a : b;
        const int j = (i == a) ? b : a;
        if (z->has(i, j)) {
          throw std::runtime_error("dissimilarity: duplicate pair (" +
                                   std::to_string(a + 1) + "," + std::to_string(b + 1) +
                                   ")");
        }
        Eigen::VectorXd v(dim);
        for (int r = 0; r < dim; ++r) {
          v(r) = to_double(fields.at(2 + r), "dissimilarity");
        }
        z->set(i, j, v);
        ++report.dissimilarity_rows;
      }
      if (!header_seen) throw std::runtime_error("dissimilarity: missing header");
      data.z.push_back(std::move(*z));
    }
  }

  if (!config.centroids_path.empty()) {
    graph.set_centroids(read_centroids(config.resolve(config.centroids_path), n));
  }

  data.validate(graph);
  return Dataset{std::move(graph), std::move(data), std::move(report)};
}

std::string manifest_hash(const json& manifest) {
  json clean = manifest;
  clean.erase("manifest_hash");
  const std::string text = clean.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::vector<std::string> site_names(const std::string& prefix, int n, int q) {
  std::vector<std::string> names;
  for (int d = 0; d < q; ++d) {
    for (int i = 0; i < n; ++i) {
      names.push_back(prefix + "_d" + std::to_string(d + 1) + "_r" +
                      std::to_string(i + 1));
    }
  }
  return names;
}

}  // namespace

void write_samples(const fs::path& dir, const PosteriorSamples& samples,
                   const json& manifest) {
  fs::create_directories(dir);
  const std::string hash = manifest.at("manifest_hash").get<std::string>();
  const int n = samples.n, q = samples.q, p = samples.p, k = samples.truncation;

  std::vector<std::string> beta_names;
  for (int d = 0; d < q; ++d) {
    for (int c = 0; c < p; ++c) {
      beta_names.push_back("beta_d" + std::to_string(d + 1) + "_c" + std::to_string(c + 1));
    }
  }
  write_matrix_csv(dir / "beta.csv", beta_names, samples.beta, hash);

  std::vector<std::string> theta_names, stick_names;
  for (int j = 0; j < k; ++j) {
    theta_names.push_back("theta_" + std::to_string(j + 1));
    stick_names.push_back("v_" + std::to_string(j + 1));
  }
  write_matrix_csv(dir / "theta.csv", theta_names, samples.theta, hash);
  write_matrix_csv(dir / "sticks.csv", stick_names, samples.sticks, hash);
  write_matrix_csv(dir / "tau_s.csv", {"tau_s"}, samples.tau_s, hash);
  write_matrix_csv(dir / "gamma.csv", site_names("gamma", n, q), samples.gamma, hash);
  std::vector<std::string> rho_names;
  for (int d = 0; d < q; ++d) rho_names.push_back("rho_" + std::to_string(d + 1));
  write_matrix_csv(dir / "rho.csv", rho_names, samples.rho, hash);

  std::vector<std::string> eta_names;
  for (int d = 0; d < q; ++d) {
    const int rd = samples.eta_offsets[d + 1] - samples.eta_offsets[d];
    for (int r = 0; r < rd; ++r) {
      eta_names.push_back("eta_d" + std::to_string(d + 1) + "_" + std::to_string(r + 1));
    }
  }
  write_matrix_csv(dir / "eta.csv", eta_names, samples.eta, hash);
  write_matrix_csv(dir / "cross.csv", samples.cross_names, samples.cross, hash);
  write_matrix_csv(dir / "phi.csv", site_names("phi", n, q), samples.phi, hash);

  Eigen::MatrixXd labels(samples.kept, n * q);
  for (int t = 0; t < samples.kept; ++t) {
    for (int s = 0; s < n * q; ++s) {
      labels(t, s) = static_cast<double>(samples.labels[t][s] + 1);
    }
  }
  write_matrix_csv(dir / "u.csv", site_names("u", n, q), labels, hash);

  auto out = open_output(dir / "manifest.json");
  out << manifest.dump(2) << "\n";
}

json read_manifest(const fs::path& dir) {
  auto in = open_input(dir / "manifest.json");
  json j;
  in >> j;
  return j;
}

PosteriorSamples read_samples(const fs::path& dir) {
  const json manifest = read_manifest(dir);
  PosteriorSamples s;
  s.n = manifest.at("n").get<int>();
  s.q = manifest.at("q").get<int>();
  s.p = manifest.at("p").get<int>();
  s.truncation = manifest.at("truncation").get<int>();
  s.kept = manifest.at("kept").get<int>();
  s.variant = variant_from_name(manifest.at("variant").get<std::string>());
  s.eta_offsets = manifest.at("eta_offsets").get<std::vector<int>>();
  s.cross_names = manifest.at("cross_names").get<std::vector<std::string>>();

  const int big_n = s.n * s.q;
  s.beta = read_matrix_csv(dir / "beta.csv", s.q * s.p);
  s.theta = read_matrix_csv(dir / "theta.csv", s.truncation);
  s.sticks = read_matrix_csv(dir / "sticks.csv", s.truncation);
  s.tau_s = read_matrix_csv(dir / "tau_s.csv", 1);
  s.gamma = read_matrix_csv(dir / "gamma.csv", big_n);
  s.rho = read_matrix_csv(dir / "rho.csv", s.q);
  s.eta = read_matrix_csv(dir / "eta.csv", s.eta_offsets.back());
  s.cross = read_matrix_csv(dir / "cross.csv", static_cast<int>(s.cross_names.size()));
  s.phi = read_matrix_csv(dir / "phi.csv", big_n);
  const Eigen::MatrixXd labels = read_matrix_csv(dir / "u.csv", big_n);
  s.labels.assign(s.kept, std::vector<int>(big_n));
  for (int t = 0; t < s.kept; ++t) {
    for (int c = 0; c < big_n; ++c) {
      s.labels[t][c] = static_cast<int>(labels(t, c)) - 1;
    }
  }
  return s;
}

void write_boundary_report(const fs::path& path, const std::vector<ProbeSpec>& probes,
                           const std::vector<BoundaryProbe>& results,
                           const std::vector<FdrCurve>& curves,
                           const std::string& hash) {
  auto out = open_output(path);
  out << "# manifest=" << hash << "\n";
  out << "probe,edge_i,edge_j,disease_d,disease_dprime,v,selected\n";
  for (std::size_t k = 0; k < probes.size(); ++k) {
    const auto& probe = results[k];
    const auto& curve = curves[k];
    for (int e = 0; e < probe.m; ++e) {
      out << probes[k].label() << "," << probe.edges[e].first + 1 << ","
          << probe.edges[e].second + 1 << "," << probes[k].d + 1 << ","
          << (probes[k].kind == ProbeKind::single ? 0 : probes[k].dprime + 1) << ","
          << fmt(probe.v(e)) << "," << static_cast<int>(curve.selected[e]) << "\n";
    }
  }
}

void write_fdr_curves(const fs::path& path, const std::vector<ProbeSpec>& probes,
                      const std::vector<FdrCurve>& curves, const std::string& hash) {
  auto out = open_output(path);
  out << "# manifest=" << hash << "\n";
  out << "probe,t,fdr_hat,fnr_hat,n_selected\n";
  for (std::size_t k = 0; k < probes.size(); ++k) {
    for (const auto& step : curves[k].steps) {
      out << probes[k].label() << "," << fmt(step.t) << "," << fmt(step.fdr) << ","
          << fmt(step.fnr) << "," << step.selected << "\n";
    }
  }
}

void write_adjacency_report(const fs::path& path, const AdjacencyDetection& detection,
                            const std::string& hash) {
  auto out = open_output(path);
  out << "# manifest=" << hash << "\n";
  out << "disease_id,edge_i,edge_j,prob_not_adjacent,detected\n";
  for (int d = 0; d < detection.prob_removed.cols(); ++d) {
    for (std::size_t e = 0; e < detection.edges.size(); ++e) {
      out << d + 1 << "," << detection.edges[e].first + 1 << ","
          << detection.edges[e].second + 1 << ","
          << fmt(detection.prob_removed(static_cast<int>(e), d)) << ","
          << static_cast<int>(detection.detected(static_cast<int>(e), d)) << "\n";
    }
  }
}

void write_simulation(const fs::path& dir, const SimScenario& scenario,
                      const SimOutput& out, const RegionGraph& g) {
  fs::create_directories(dir);
  const int n = g.size();
  const int q = scenario.disease.q;

  json sim;
  sim["command"] = "simulate";
  sim["schema_version"] = 1;
  sim["seed"] = scenario.seed;
  sim["variant"] = variant_name(scenario.disease.variant);
  sim["n"] = n;
  sim["q"] = q;
  sim["truncation"] = scenario.truncation;
  sim["alpha"] = scenario.dp_alpha;
  sim["tau_s"] = scenario.tau_s;
  sim["replicates"] = scenario.replicates;
  sim["z_scale"] = out.z_scale;
  std::vector<double> beta(scenario.beta.data(), scenario.beta.data() + q);
  std::vector<double> rho(scenario.rho.data(), scenario.rho.data() + q);
  std::vector<double> eta(scenario.eta.data(), scenario.eta.data() + q);
  sim["beta"] = beta;
  sim["rho"] = rho;
  sim["eta"] = eta;
  sim["manifest_hash"] = "";
  sim["manifest_hash"] = manifest_hash(sim);
  const std::string hash = sim["manifest_hash"];

  {
    auto f = open_output(dir / "edges.txt");
    f << "# manifest=" << hash << "\n";
    for (auto [a, b] : g.edges()) f << a + 1 << " " << b + 1 << "\n";
  }
  if (g.has_centroids()) {
    auto f = open_output(dir / "centroids.csv");
    f << "# manifest=" << hash << "\n";
    f << "region_id,x,y\n";
    for (int i = 0; i < n; ++i) {
      f << i + 1 << "," << fmt(g.centroids()[i][0]) << "," << fmt(g.centroids()[i][1])
        << "\n";
    }
  }
  for (int d = 0; d < q; ++d) {
    auto f = open_output(dir / ("dissimilarity_d" + std::to_string(d + 1) + ".csv"));
    f << "# manifest=" << hash << "\n";
    f << "i,j,z1\n";
    for (int i = 0; i < n; ++i) {
      for (int j : g.preceding_neighbors(i)) {
        f << i + 1 << "," << j + 1 << "," << fmt(out.z[d].get(i, j)(0)) << "\n";
      }
    }
  }
  for (int r = 0; r < scenario.replicates; ++r) {
    auto f = open_output(dir / ("counts_rep" + std::to_string(r + 1) + ".csv"));
    f << "# manifest=" << hash << "\n";
    f << "region_id,disease_id,count,expected\n";
    for (int d = 0; d < q; ++d) {
      for (int i = 0; i < n; ++i) {
        f << i + 1 << "," << d + 1 << "," << fmt(out.counts[r](i, d)) << ","
          << fmt(out.expected(i, d)) << "\n";
      }
    }
  }
  {
    auto f = open_output(dir / "field.csv");
    f << "# manifest=" << hash << "\n";
    f << "region_id,disease_id,gamma,phi,label\n";
    for (int d = 0; d < q; ++d) {
      for (int i = 0; i < n; ++i) {
        const int s = d * n + i;
        f << i + 1 << "," << d + 1 << "," << fmt(out.gamma(s)) << "," << fmt(out.phi(s))
          << "," << out.labels[s] + 1 << "\n";
      }
    }
  }
  {
    auto f = open_output(dir / "truth.csv");
    f << "# manifest=" << hash << "\n";
    f << "probe,edge_i,edge_j,disease_d,disease_dprime,flag\n";
    std::vector<ProbeSpec> probes;
    for (int d = 0; d < q; ++d) probes.push_back({ProbeKind::single, d, -1});
    for (int d = 0; d < q; ++d) {
      for (int h = d + 1; h < q; ++h) {
        probes.push_back({ProbeKind::cross, d, h});
        probes.push_back({ProbeKind::shared, d, h});
        probes.push_back({ProbeKind::mutual, d, h});
      }
    }
    for (const auto& probe : probes) {
      const auto flags = true_boundaries(out, g, probe.kind, probe.d, probe.dprime);
      for (std::size_t e = 0; e < flags.size(); ++e) {
        f << probe.label() << "," << g.edges()[e].first + 1 << ","
          << g.edges()[e].second + 1 << "," << probe.d + 1 << ","
          << (probe.kind == ProbeKind::single ? 0 : probe.dprime + 1) << ","
          << static_cast<int>(flags[e]) << "\n";
      }
    }
  }
  {
    auto f = open_output(dir / "sim.json");
    f << sim.dump(2) << "\n";
  }
  {
    // a ready-to-run fit configuration over the first replicate
    RunConfig c;
    c.base_dir = dir;
    c.edges_path = "edges.txt";
    c.counts_path = "counts_rep1.csv";
    for (int d = 0; d < q; ++d) {
      c.dissimilarity_paths.push_back("dissimilarity_d" + std::to_string(d + 1) + ".csv");
    }
    c.centroids_path = g.has_centroids() ? "centroids.csv" : "";
    c.disease = scenario.disease;
    c.priors = PriorSpec::defaults(q);
    c.chain.truncation = scenario.truncation;
    c.chain.seed = scenario.seed + 1;
    c.output_dir = "fit";
    auto f = open_output(dir / "run.json");
    f << run_config_json(c).dump(2) << "\n";
  }
}

}  // namespace womble
