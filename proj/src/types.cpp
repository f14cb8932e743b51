#include "swarmcast/types.hpp"

namespace swarmcast {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::CoordinateOutOfRange: return "CoordinateOutOfRange";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::NoAgents: return "NoAgents";
    case ErrorCode::NoPoints: return "NoPoints";
    case ErrorCode::SingleCluster: return "SingleCluster";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateFrame: return "DuplicateFrame";
    case ErrorCode::NonConsecutiveFrames: return "NonConsecutiveFrames";
    case ErrorCode::TooFewFrames: return "TooFewFrames";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

const char* split_name(SplitTag tag) {
  switch (tag) {
    case SplitTag::Train: return "train";
    case SplitTag::Val: return "val";
    case SplitTag::Test: return "test";
  }
  return "unknown";
}

const Frame& validate_frame(const Frame& frame) {
  for (const Vec2& a : frame.agents) {
    if (!std::isfinite(a.x) || !std::isfinite(a.y)) {
      throw Error(ErrorCode::NonFinite,
                  "frame " + std::to_string(frame.index) + " has a non-finite coordinate");
    }
    if (a.x < 0.0 || a.x > 1.0 || a.y < 0.0 || a.y > 1.0) {
      throw Error(ErrorCode::CoordinateOutOfRange,
                  "frame " + std::to_string(frame.index) + " has coordinate (" +
                      std::to_string(a.x) + ", " + std::to_string(a.y) +
                      ") outside [0,1]");
    }
  }
  return frame;
}

void validate_codebook(const Codebook& codebook) {
  if (codebook.k() < 1) {
    throw Error(ErrorCode::InvalidK, "codebook must have at least one neuron");
  }
  if (!(codebook.min_radius > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "min_radius must be positive");
  }
  for (const Vec2& w : codebook.weights) {
    if (!std::isfinite(w.x) || !std::isfinite(w.y)) {
      throw Error(ErrorCode::NonFinite, "codebook contains a non-finite weight");
    }
  }
}

void validate_chunk(const Chunk& chunk, int chunk_len) {
  if (static_cast<int>(chunk.frames.size()) != chunk_len) {
    throw Error(ErrorCode::LengthMismatch,
                "chunk " + std::to_string(chunk.id) + " has " +
                    std::to_string(chunk.frames.size()) + " frames, expected " +
                    std::to_string(chunk_len));
  }
  for (std::size_t i = 1; i < chunk.frames.size(); ++i) {
    if (chunk.frames[i].index != chunk.frames[i - 1].index + 1) {
      throw Error(ErrorCode::NonConsecutiveFrames,
                  "chunk " + std::to_string(chunk.id) + " frame indices not consecutive at " +
                      std::to_string(chunk.frames[i].index));
    }
  }
}

}  // namespace swarmcast
