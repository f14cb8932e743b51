#include "swarmcast/kmeans.hpp"

#include <algorithm>
#include <limits>

namespace swarmcast {

std::vector<int> assign(const std::vector<Vec2>& points, const std::vector<Vec2>& centroids) {
  std::vector<int> labels(points.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_j = 0;
    for (std::size_t j = 0; j < centroids.size(); ++j) {
      const double d = distance(points[i], centroids[j]);
      if (d < best) {
        best = d;
        best_j = static_cast<int>(j);
      }
    }
    labels[i] = best_j;
  }
  return labels;
}

KMeansResult lloyd(const std::vector<Vec2>& points, int k, const Codebook& init,
                   int max_iter, double tol) {
  if (points.empty()) {
    throw Error(ErrorCode::NoPoints, "lloyd needs at least one point");
  }
  validate_codebook(init);
  if (k != init.k()) {
    throw Error(ErrorCode::InvalidK, "k=" + std::to_string(k) + " does not match init codebook k=" +
                                         std::to_string(init.k()));
  }

  KMeansResult result;
  result.centroids = init.weights;
  for (int iter = 0; iter < max_iter; ++iter) {
    result.labels = assign(points, result.centroids);
    std::vector<double> sum_x(static_cast<std::size_t>(k), 0.0);
    std::vector<double> sum_y(static_cast<std::size_t>(k), 0.0);
    std::vector<std::int64_t> count(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::size_t j = static_cast<std::size_t>(result.labels[i]);
      sum_x[j] += points[i].x;
      sum_y[j] += points[i].y;
      ++count[j];
    }
    double moved = 0.0;
    for (int j = 0; j < k; ++j) {
      const std::size_t sj = static_cast<std::size_t>(j);
      if (count[sj] == 0) continue;
      const Vec2 next{sum_x[sj] / static_cast<double>(count[sj]),
                      sum_y[sj] / static_cast<double>(count[sj])};
      moved = std::max(moved, distance(next, result.centroids[sj]));
      result.centroids[sj] = next;
    }
    result.iterations = iter + 1;
    if (moved < tol) break;
  }

  result.labels = assign(points, result.centroids);
  result.inertia = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = distance(points[i], result.centroids[static_cast<std::size_t>(result.labels[i])]);
    result.inertia += d * d;
  }
  return result;
}

}  // namespace swarmcast
