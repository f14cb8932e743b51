#pragma once

#include <vector>

#include "swarmcast/types.hpp"

namespace swarmcast {

struct SilhouetteReport {
  std::vector<double> per_point;  // each in [-1, 1]
  double mean = 0.0;
  double std_dev = 0.0;
};

// Mean over non-empty frames of the per-frame average distance from each
// agent to its nearest centroid. Empty frames are excluded from the mean.
double avg_distance(const std::vector<Frame>& frames, const Codebook& codebook);

// Per-point silhouette s = (b - a) / max(a, b) with a the mean intra-cluster
// distance (excluding self) and b the smallest mean distance to another
// cluster. Points in singleton clusters score 0. Needs at least two
// distinct labels.
SilhouetteReport silhouette(const std::vector<Vec2>& points, const std::vector<int>& labels);

// Number of entries strictly above threshold.
int cluster_count(const StateVector& state, double threshold);

struct RolloutMse {
  std::vector<double> per_step;
  double mean = 0.0;
};

// Per step: alpha^2 / k * ||s - s_hat||^2. alpha = 1 gives the plain MSE,
// and the identity mse(alpha) = alpha^2 * mse(1) holds exactly.
RolloutMse rollout_mse(const std::vector<StateVector>& predicted,
                       const std::vector<StateVector>& truth, double alpha);

}  // namespace swarmcast
