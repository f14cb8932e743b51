#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "swarmcast/types.hpp"

namespace swarmcast {

enum class EventKind { Merge, Split, Spawn, Death };

const char* event_name(EventKind kind);
EventKind parse_event_kind(const std::string& name);

struct ScriptedEvent {
  std::int64_t frame = 0;
  EventKind kind = EventKind::Split;
};

struct SynthEvent {
  std::int64_t frame = 0;
  EventKind kind = EventKind::Split;
  bool scripted = false;
};

// Multi-agent scenario generator: groups of agents follow smooth correlated
// random walks reflected at the map border; merge events steer two groups
// together until they fuse, split events fork a group with diverging
// headings, spawn/death add and remove whole groups. Bit-reproducible per
// seed.
struct SynthConfig {
  int n_groups = 5;
  int agents_min = 8;
  int agents_max = 16;
  double group_speed = 0.003;   // normalized units per frame
  double heading_sigma = 0.05;  // per-frame heading noise, radians
  double turn_rate = 0.0;       // constant per-frame turn, sign drawn per group
  double merge_prob = 0.0;
  double split_prob = 0.0;
  double spawn_prob = 0.0;
  double death_prob = 0.0;
  double jitter_sigma = 0.012;  // member spread around the group center
  double wobble_sigma = 0.003;  // fresh per-frame noise on each member
  std::int64_t frames = 2000;
  std::uint64_t seed = 0;
  int min_groups = 2;
  int max_groups = 10;
  int diverge_frames = 30;  // straight-line frames for both halves of a split
  double frame_dt = 0.2;
  std::vector<ScriptedEvent> scripted;
};

struct SynthResult {
  std::vector<Frame> frames;
  std::vector<SynthEvent> events;
};

SynthResult synth_scenario(const SynthConfig& config);

enum class FrameFormat { Jsonl, Csv };

// JSONL: one object per frame, {"t": int, "agents": [[x,y],...],
// "player": [int,...]?} in raw map units. CSV: columns t,x,y[,player],
// one agent per row, optional header. Coordinates are divided by
// map_extent; frames come back sorted by index.
std::vector<Frame> load_frames(const std::string& path, FrameFormat format,
                               double map_extent = 256.0, double frame_dt = 0.2);

// Writes the JSONL schema above, multiplying coordinates by map_extent.
void save_frames_jsonl(const std::vector<Frame>& frames, const std::string& path,
                       double map_extent = 1.0);

void save_events_jsonl(const std::vector<SynthEvent>& events, const std::string& path);
std::vector<SynthEvent> load_events_jsonl(const std::string& path);

struct DatasetSplit {
  std::vector<Chunk> train;
  std::vector<Chunk> val;
  std::vector<Chunk> test;
};

// Consecutive non-overlapping windows of chunk_len frames, partitioned into
// contiguous train/val/test blocks by the given ratios (train first, then
// val, then test). Leftover frames past the last full chunk are dropped.
DatasetSplit chunk_and_split(const std::vector<Frame>& frames, int chunk_len = 50,
                             std::array<int, 3> ratios = {8, 1, 1});

// All chunks of a split in order, train then val then test.
std::vector<Chunk> all_chunks(const DatasetSplit& split);

}  // namespace swarmcast
