#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swarmcast/types.hpp"

namespace swarmcast {

// Below this value a state entry is treated as noise, not a cluster.
// Half the default minimum radius; applies when decoding predicted states.
inline constexpr double kDefaultDecodeThreshold = 0.005;

// Settings for winner-take-all codebook training.
struct HebbianConfig {
  int k = 64;
  double learning_rate = 1.0;  // eta
  int batch_frames = 16;       // frames pooled into one weight update
  int epochs = 20;
  std::uint64_t seed = 0;
  double min_radius = 0.01;
};

struct WinnerResult {
  int neuron_index = 0;
  double distance = 0.0;
};

// k x 2 weights, entries i.i.d. uniform on [0,1]; deterministic per seed.
Codebook init_codebook(int k, std::uint64_t seed, double min_radius = 0.01);

// Nearest centroid by Euclidean distance; ties go to the lowest index.
WinnerResult winner(const Vec2& x, const Codebook& codebook);

// Per-agent state: the winner entry holds max(min_radius, distance),
// every other entry is zero.
StateVector agent_state(const Vec2& x, const Codebook& codebook, double min_radius);

// Element-wise max over the per-agent states; neurons with no assigned
// agent stay at zero. An empty frame encodes to the all-zero vector.
// Read-only on the codebook.
StateVector encode_frame(const Frame& frame, const Codebook& codebook, double min_radius);

std::vector<StateVector> encode_frames(const std::vector<Frame>& frames,
                                       const Codebook& codebook, double min_radius);

// One aggregated update over the batch:
//   dw_j = (eta / N) * sum over agents i with winner j of (x_i - w_j)
// where N is the total agent count across all frames. Neurons with no
// assigned agent are unchanged. N == 0 returns the codebook as-is and
// reports it through empty_batch.
Codebook hebbian_update(const std::vector<Frame>& frames, const Codebook& codebook,
                        double learning_rate, bool* empty_batch = nullptr);

struct CodebookTrainResult {
  Codebook codebook;
  // [0] is the held-out average distance before training, then one entry
  // per epoch.
  std::vector<double> avg_distance_history;
  int empty_batches = 0;
};

// Streams batches of config.batch_frames frames in dataset order for
// config.epochs passes. The held-out set feeds the distance history; when
// empty, the training frames are measured instead.
CodebookTrainResult train_codebook(const std::vector<Frame>& frames,
                                   const HebbianConfig& config,
                                   const std::vector<Frame>& heldout = {});

// Emits (centroid, max(min_radius, state[i])) for every entry above
// threshold.
ClusterConfig decode(const StateVector& state, const Codebook& codebook,
                     double threshold = kDefaultDecodeThreshold,
                     std::int64_t source_frame = 0);

// Versioned JSON codebook file.
void save_codebook(const Codebook& codebook, const std::string& path);
Codebook load_codebook(const std::string& path);

}  // namespace swarmcast
