#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "womble/dagar.hpp"
#include "womble/region_graph.hpp"

namespace womble {

/// Counts, expected counts, design matrix and per-disease dissimilarities.
/// Sites are enumerated disease-major: site = d*n + i.
struct ObservedData {
  int n = 0, q = 0, p = 0;
  Eigen::MatrixXd y;         // n x q counts
  Eigen::MatrixXd expected;  // n x q, strictly positive
  Eigen::MatrixXd design;    // (n*q) x p, row per site
  std::vector<std::string> design_names;
  std::vector<EdgeDissimilarity> z;  // per disease

  int sites() const { return n * q; }
  int site(int region, int disease) const { return disease * n + region; }
  double count(int site_index) const { return y(site_index % n, site_index / n); }
  double offset(int site_index) const { return expected(site_index % n, site_index / n); }

  /// Intercept-only data with unit expected counts; dissimilarities optional.
  static ObservedData intercept_only(int n, int q, Eigen::MatrixXd counts,
                                     std::vector<EdgeDissimilarity> z = {});

  void validate(const RegionGraph& g) const;
};

}  // namespace womble
