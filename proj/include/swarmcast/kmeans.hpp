#pragma once

#include <vector>

#include "swarmcast/types.hpp"

namespace swarmcast {

struct KMeansResult {
  std::vector<Vec2> centroids;
  std::vector<int> labels;
  int iterations = 0;
  double inertia = 0.0;  // sum of squared point-to-centroid distances
};

// labels[i] = argmin_j ||points[i] - centroids[j]||, lowest-index tie-break.
std::vector<int> assign(const std::vector<Vec2>& points, const std::vector<Vec2>& centroids);

// Lloyd iteration from the given codebook until the largest centroid
// displacement drops below tol or max_iter passes. Clusters that lose all
// points keep their previous centroid.
KMeansResult lloyd(const std::vector<Vec2>& points, int k, const Codebook& init,
                   int max_iter = 200, double tol = 1e-9);

}  // namespace swarmcast
