#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "womble/dagar.hpp"
#include "womble/region_graph.hpp"
#include "womble/sampler.hpp"

namespace womble {

enum class ProbeKind { single, cross, shared, mutual };

std::string probe_name(ProbeKind kind);
ProbeKind probe_from_name(const std::string& name);

/// Posterior boundary probabilities for one probe over the geographic edges.
struct BoundaryProbe {
  ProbeKind kind = ProbeKind::single;
  int d = 0, dprime = -1;  // 0-based disease indices; dprime unused for single
  std::vector<std::pair<int, int>> edges;  // canonical, i < j
  Eigen::VectorXd v;                       // one probability per edge
  int m = 0;                               // total geographic boundary count
};

/// v(edge) = fraction of retained draws in which the probe's label-inequality
/// event holds. single: u_id != u_jd; cross and mutual: u_id != u_jd' and
/// u_id' != u_jd; shared: u_id != u_jd and u_id' != u_jd'.
BoundaryProbe boundary_probs(const PosteriorSamples& samples, const RegionGraph& g,
                             ProbeKind kind, int d, int dprime = -1);

/// Estimated FDR at threshold t: sum (1-v) 1[v>t] / sum 1[v>t].
/// Empty selection has no discoveries; nullopt.
std::optional<double> fdr_estimate(const BoundaryProbe& probe, double t);

/// Estimated FNR at threshold t: sum v 1[v<=t] / (m - sum 1[v>t]).
/// Degenerate when every edge is selected; nullopt.
std::optional<double> fnr_estimate(const BoundaryProbe& probe, double t);

struct FdrCurve {
  struct Step {
    double t = 0.0;       // the distinct probability admitting this selection
    double fdr = 0.0;
    double fnr = 0.0;
    int selected = 0;
  };
  std::vector<Step> steps;          // walked from the largest distinct v down
  std::optional<double> t_star;     // empty when no selection meets the budget
  std::vector<char> selected;       // per edge, the selection at t_star
  int selected_count() const;
};

/// Walk the distinct posterior probabilities from the top and keep the
/// largest selection whose estimated FDR stays within the budget; that
/// selection minimizes the estimated FNR subject to the constraint. The
/// reported t* is the smallest included probability (selection rule
/// v >= t*). No qualifying threshold yields an empty selection, not an
/// error.
FdrCurve select_threshold(const BoundaryProbe& probe, double zeta);

struct TopScore {
  double sensitivity = 0.0;
  double specificity = 0.0;
};

/// Classify the top-T edges by posterior probability (ties broken by edge
/// index ascending) against known truth flags.
TopScore score_against_truth(const BoundaryProbe& probe,
                             const std::vector<char>& truth, int top_count);

/// Realized FDR of a selection against known truth; 0 when nothing selected.
double truth_fdr(const std::vector<char>& selected, const std::vector<char>& truth);

/// Per-edge, per-disease posterior probability that the adjacency model
/// removes the link: fraction of draws with exp(-z_ij' eta_d) < 0.5.
struct AdjacencyDetection {
  std::vector<std::pair<int, int>> edges;  // canonical geographic edges
  Eigen::MatrixXd prob_removed;            // m x q
  Eigen::MatrixXd detected;                // prob_removed > cutoff
  double cutoff = 0.5;
};

AdjacencyDetection adjacency_detection(const PosteriorSamples& samples,
                                       const RegionGraph& g,
                                       const std::vector<EdgeDissimilarity>& z,
                                       double cutoff = 0.5);

}  // namespace womble
