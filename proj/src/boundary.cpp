#include "womble/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace womble {

std::string probe_name(ProbeKind kind) {
  switch (kind) {
    case ProbeKind::single: return "single";
    case ProbeKind::cross: return "cross";
    case ProbeKind::shared: return "shared";
    case ProbeKind::mutual: return "mutual";
  }
  return "?";
}

ProbeKind probe_from_name(const std::string& name) {
  if (name == "single") return ProbeKind::single;
  if (name == "cross") return ProbeKind::cross;
  if (name == "shared") return ProbeKind::shared;
  if (name == "mutual") return ProbeKind::mutual;
  throw std::invalid_argument("unknown probe kind: " + name);
}

BoundaryProbe boundary_probs(const PosteriorSamples& samples, const RegionGraph& g,
                             ProbeKind kind, int d, int dprime) {
  const int n = samples.n;
  const int q = samples.q;
  if (d < 0 || d >= q || (kind != ProbeKind::single && (dprime < 0 || dprime >= q))) {
    throw std::invalid_argument("boundary_probs: disease index out of range");
  }
  BoundaryProbe probe;
  probe.kind = kind;
  probe.d = d;
  probe.dprime = (kind == ProbeKind::single) ? -1 : dprime;
  probe.edges = g.edges();
  probe.m = static_cast<int>(probe.edges.size());
  probe.v = Eigen::VectorXd::Zero(probe.m);

  const int draws = static_cast<int>(samples.labels.size());
  if (draws == 0) throw std::invalid_argument("boundary_probs: no retained draws");
  for (const auto& u : samples.labels) {
    for (int e = 0; e < probe.m; ++e) {
      const auto [i, j] = probe.edges[e];
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
      if (hit) probe.v(e) += 1.0;
    }
  }
  probe.v /= static_cast<double>(draws);
  return probe;
}

std::optional<double> fdr_estimate(const BoundaryProbe& probe, double t) {
  double num = 0.0;
  int count = 0;
  for (int e = 0; e < probe.m; ++e) {
    if (probe.v(e) > t) {
      num += 1.0 - probe.v(e);
      ++count;
    }
  }
  if (count == 0) return std::nullopt;  // no discoveries at this threshold
  return num / static_cast<double>(count);
}

std::optional<double> fnr_estimate(const BoundaryProbe& probe, double t) {
  double num = 0.0;
  int selected = 0;
  for (int e = 0; e < probe.m; ++e) {
    if (probe.v(e) > t) {
      ++selected;
    } else {
      num += probe.v(e);
    }
  }
  if (selected == probe.m) return std::nullopt;  // degenerate denominator
  return num / static_cast<double>(probe.m - selected);
}

int FdrCurve::selected_count() const {
  return static_cast<int>(std::count(selected.begin(), selected.end(), 1));
}

FdrCurve select_threshold(const BoundaryProbe& probe, double zeta) {
  if (zeta <= 0.0 || zeta >= 1.0) {
    throw std::invalid_argument("select_threshold: zeta must lie in (0,1)");
  }
  std::vector<double> distinct(probe.v.data(), probe.v.data() + probe.m);
  std::sort(distinct.begin(), distinct.end(), std::greater<double>());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  FdrCurve curve;
  curve.selected.assign(probe.m, 0);
  const double total_v = probe.v.sum();

  for (double w : distinct) {
    // selection at this step: every edge with v >= w
    double sum_one_minus_v = 0.0;
    double sum_v_selected = 0.0;
    int count = 0;
    for (int e = 0; e < probe.m; ++e) {
      if (probe.v(e) >= w) {
        sum_one_minus_v += 1.0 - probe.v(e);
        sum_v_selected += probe.v(e);
        ++count;
      }
    }
    FdrCurve::Step step;
    step.t = w;
    step.selected = count;
    step.fdr = sum_one_minus_v / static_cast<double>(count);
    step.fnr = (count == probe.m)
                   ? 0.0
                   : (total_v - sum_v_selected) / static_cast<double>(probe.m - count);
    curve.steps.push_back(step);
    if (step.fdr <= zeta) {
      curve.t_star = w;  // the walk enlarges the selection, keep the latest
    }
  }
  if (curve.t_star) {
    for (int e = 0; e < probe.m; ++e) {
      curve.selected[e] = probe.v(e) >= *curve.t_star ? 1 : 0;
    }
  }
  return curve;
}

TopScore score_against_truth(const BoundaryProbe& probe,
                             const std::vector<char>& truth, int top_count) {
  if (static_cast<int>(truth.size()) != probe.m) {
    throw std::invalid_argument("score_against_truth: truth length mismatch");
  }
  if (top_count < 0 || top_count > probe.m) {
    throw std::invalid_argument("score_against_truth: top count exceeds edge count");
  }
  std::vector<int> idx(probe.m);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (probe.v(a) != probe.v(b)) return probe.v(a) > probe.v(b);
    return a < b;  // ties broken by edge index ascending
  });

  int true_total = 0, false_total = 0;
  for (char f : truth) (f ? true_total : false_total)++;
  int detected_true = 0, detected_false = 0;
  for (int r = 0; r < top_count; ++r) {
    (truth[idx[r]] ? detected_true : detected_false)++;
  }
  TopScore score;
  score.sensitivity =
      true_total == 0 ? 1.0 : static_cast<double>(detected_true) / true_total;
  score.specificity =
      false_total == 0 ? 1.0
                       : static_cast<double>(false_total - detected_false) / false_total;
  return score;
}

double truth_fdr(const std::vector<char>& selected, const std::vector<char>& truth) {
  if (selected.size() != truth.size()) {
    throw std::invalid_argument("truth_fdr: length mismatch");
  }
  int count = 0, false_hits = 0;
  for (std::size_t e = 0; e < selected.size(); ++e) {
    if (selected[e]) {
      ++count;
      if (!truth[e]) ++false_hits;
    }
  }
  if (count == 0) return 0.0;  // no discoveries, no false discoveries
  return static_cast<double>(false_hits) / static_cast<double>(count);
}

AdjacencyDetection adjacency_detection(const PosteriorSamples& samples,
                                       const RegionGraph& g,
                                       const std::vector<EdgeDissimilarity>& z,
                                       double cutoff) {
  const int q = samples.q;
  if (static_cast<int>(z.size()) != q) {
    throw std::invalid_argument("adjacency_detection: need dissimilarities per disease");
  }
  AdjacencyDetection out;
  out.cutoff = cutoff;
  out.edges = g.edges();
  const int m = static_cast<int>(out.edges.size());
  out.prob_removed = Eigen::MatrixXd::Zero(m, q);

  const int draws = static_cast<int>(samples.eta.rows());
  if (draws == 0) throw std::invalid_argument("adjacency_detection: no retained draws");
  for (int e = 0; e < m; ++e) {
    const auto [a, b] = out.edges[e];
    // the later region in the order carries the dissimilarity entry
    const int i = g.position(a) > g.position(b) ? a : b;
    const int j = (i == a) ? b : a;
    for (int d = 0; d < q; ++d) {
      if (z[d].dim() == 0) continue;  // fixed adjacency, never removed
      const Eigen::VectorXd& zij = z[d].get(i, j);
      const int off = samples.eta_offsets[d];
      const int rd = samples.eta_offsets[d + 1] - off;
      int hits = 0;
      for (int t = 0; t < draws; ++t) {
        const double s = zij.dot(samples.eta.row(t).segment(off, rd));
        if (std::exp(-s) < 0.5) ++hits;
      }
      out.prob_removed(e, d) = static_cast<double>(hits) / draws;
    }
  }
  out.detected = (out.prob_removed.array() > cutoff).cast<double>();
  return out;
}

}  // namespace womble
