#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace swarmcast {

// Error codes shared by every module. The CLI renders them as a single
// machine-parseable line "error: <name>: <message>" and exits nonzero.
enum class ErrorCode {
  CoordinateOutOfRange,
  NonFinite,
  InvalidK,
  NoAgents,
  NoPoints,
  SingleCluster,
  LengthMismatch,
  ShapeMismatch,
  ParseError,
  DuplicateFrame,
  NonConsecutiveFrames,
  TooFewFrames,
  EmptyDataset,
  InvalidConfig,
  VersionMismatch,
  CorruptFile,
  IoError,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

// One timestamped observation of the scene. Coordinates are normalized map
// units in [0,1] on both axes. Agent order carries no meaning; frames with
// zero agents are legal.
struct Frame {
  std::int64_t index = 0;
  double time_s = 0.0;
  std::vector<Vec2> agents;
};

enum class SplitTag { Train, Val, Test };

const char* split_name(SplitTag tag);

// A window of consecutive frames; the forecaster's training unit.
struct Chunk {
  int id = 0;
  SplitTag tag = SplitTag::Train;
  std::vector<Frame> frames;
};

// Neuron weight rows, interpreted directly as cluster centroids.
struct Codebook {
  std::vector<Vec2> weights;
  double min_radius = 0.01;

  int k() const { return static_cast<int>(weights.size()); }
};

// Length-k nonnegative vector; entry i is the radius of the cluster around
// centroid i, or 0 when that neuron is inactive.
using StateVector = Eigen::VectorXd;

struct Cluster {
  Vec2 centroid;
  double radius = 0.0;
};

// Decoded, human-readable cluster set for one frame.
struct ClusterConfig {
  std::vector<Cluster> clusters;
  std::int64_t source_frame = 0;
};

// Identity on valid frames; throws CoordinateOutOfRange or NonFinite.
const Frame& validate_frame(const Frame& frame);

void validate_codebook(const Codebook& codebook);

// Checks length and strictly consecutive frame indices.
void validate_chunk(const Chunk& chunk, int chunk_len);

}  // namespace swarmcast
