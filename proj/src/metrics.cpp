#include "swarmcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace swarmcast {

double avg_distance(const std::vector<Frame>& frames, const Codebook& codebook) {
  validate_codebook(codebook);
  double total = 0.0;
  std::int64_t measured_frames = 0;
  for (const Frame& frame : frames) {
    if (frame.agents.empty()) continue;
    double frame_sum = 0.0;
    for (const Vec2& agent : frame.agents) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec2& w : codebook.weights) {
        best = std::min(best, distance(agent, w));
      }
      frame_sum += best;
    }
    total += frame_sum / static_cast<double>(frame.agents.size());
    ++measured_frames;
  }
  if (measured_frames == 0) {
    throw Error(ErrorCode::NoAgents, "no non-empty frame to measure");
  }
  return total / static_cast<double>(measured_frames);
}

SilhouetteReport silhouette(const std::vector<Vec2>& points, const std::vector<int>& labels) {
  if (points.size() != labels.size()) {
    throw Error(ErrorCode::LengthMismatch, "points and labels differ in length");
  }
  const std::size_t n = points.size();
  int max_label = -1;
  for (int l : labels) {
    if (l < 0) throw Error(ErrorCode::InvalidConfig, "negative cluster label");
    max_label = std::max(max_label, l);
  }
  const std::size_t n_clusters = static_cast<std::size_t>(max_label + 1);
  std::vector<std::int64_t> sizes(n_clusters, 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  std::int64_t populated = 0;
  for (std::int64_t s : sizes) populated += (s > 0) ? 1 : 0;
  if (populated < 2) {
    throw Error(ErrorCode::SingleCluster, "silhouette needs at least two clusters");
  }

  SilhouetteReport report;
  report.per_point.resize(n, 0.0);
  // dist_sum[c] accumulates, for the current point, its distance to every
  // member of cluster c.
  std::vector<double> dist_sum(n_clusters);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      dist_sum[static_cast<std::size_t>(labels[j])] += distance(points[i], points[j]);
    }
    const std::size_t own = static_cast<std::size_t>(labels[i]);
    if (sizes[own] <= 1) {
      report.per_point[i] = 0.0;  // singleton convention
      continue;
    }
    const double a = dist_sum[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n_clusters; ++c) {
      if (c == own || sizes[c] == 0) continue;
      b = std::min(b, dist_sum[c] / static_cast<double>(sizes[c]));
    }
    const double denom = std::max(a, b);
    report.per_point[i] = (denom > 0.0) ? (b - a) / denom : 0.0;
  }

  double sum = 0.0;
  for (double s : report.per_point) sum += s;
  report.mean = sum / static_cast<double>(n);
  double var = 0.0;
  for (double s : report.per_point) var += (s - report.mean) * (s - report.mean);
  report.std_dev = std::sqrt(var / static_cast<double>(n));
  return report;
}

int cluster_count(const StateVector& state, double threshold) {
  int count = 0;
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    if (state[i] > threshold) ++count;
  }
  return count;
}

RolloutMse rollout_mse(const std::vector<StateVector>& predicted,
                       const std::vector<StateVector>& truth, double alpha) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::LengthMismatch, "predicted and truth sequence lengths differ");
  }
  RolloutMse out;
  out.per_step.reserve(predicted.size());
  const double alpha_sq = alpha * alpha;
  double total = 0.0;
  for (std::size_t t = 0; t < predicted.size(); ++t) {
    if (predicted[t].size() != truth[t].size()) {
      throw Error(ErrorCode::LengthMismatch,
                  "state width mismatch at step " + std::to_string(t));
    }
    const double step =
        alpha_sq * (predicted[t] - truth[t]).squaredNorm() / static_cast<double>(truth[t].size());
    out.per_step.push_back(step);
    total += step;
  }
  out.mean = predicted.empty() ? 0.0 : total / static_cast<double>(predicted.size());
  return out;
}

}  // namespace swarmcast
