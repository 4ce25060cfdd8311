#ifndef FOLEVAL_ANALYSIS_SILHOUETTE_HPP
#define FOLEVAL_ANALYSIS_SILHOUETTE_HPP

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "foleval/errors.hpp"

namespace foleval::analysis {

// Standard mean silhouette: for each point, mean intra-cluster distance
// against the nearest other cluster's mean distance.
inline double silhouette(const std::vector<std::array<double, 2>>& coords,
                         const std::vector<std::string>& labels) {
  size_t n = coords.size();
  if (labels.size() != n) {
    throw Error(Errc::too_few_clusters, "coords and labels differ in length");
  }
  std::map<std::string, std::vector<size_t>> clusters;
  for (size_t i = 0; i < n; ++i) clusters[labels[i]].push_back(i);
  if (clusters.size() < 2) {
    throw Error(Errc::too_few_clusters, "need at least 2 labels");
  }
  for (const auto& [label, members] : clusters) {
    if (members.size() < 2) {
      throw Error(Errc::too_few_clusters,
                  "cluster '" + label + "' has fewer than 2 members");
    }
  }

  auto dist = [&](size_t i, size_t j) {
    double dx = coords[i][0] - coords[j][0];
    double dy = coords[i][1] - coords[j][1];
    return std::sqrt(dx * dx + dy * dy);
  };

  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double a = 0.0;
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [label, members] : clusters) {
      double sum = 0.0;
      size_t count = 0;
      for (size_t j : members) {
        if (j == i) continue;
        sum += dist(i, j);
        ++count;
      }
      if (label == labels[i]) {
        a = sum / static_cast<double>(count);
      } else {
        b = std::min(b, sum / static_cast<double>(count));
      }
    }
    double denom = std::max(a, b);
    total += denom > 0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

}  // namespace foleval::analysis

#endif  // FOLEVAL_ANALYSIS_SILHOUETTE_HPP
