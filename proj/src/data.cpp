#include "swarmcast/data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "swarmcast/io.hpp"

namespace swarmcast {

const char* event_name(EventKind kind) {
  switch (kind) {
    case EventKind::Merge: return "merge";
    case EventKind::Split: return "split";
    case EventKind::Spawn: return "spawn";
    case EventKind::Death: return "death";
  }
  return "unknown";
}

EventKind parse_event_kind(const std::string& name) {
  if (name == "merge") return EventKind::Merge;
  if (name == "split") return EventKind::Split;
  if (name == "spawn") return EventKind::Spawn;
  if (name == "death") return EventKind::Death;
  throw Error(ErrorCode::ParseError, "unknown event kind '" + name + "'");
}

namespace {

constexpr double kCenterMargin = 0.05;
constexpr double kFuseDistance = 0.015;

struct Group {
  Vec2 center;
  double heading = 0.0;
  double turn = 0.0;              // constant per-frame heading increment
  std::vector<Vec2> offsets;      // persistent member offsets
  int diverge_left = 0;           // frames of straight-line motion remaining
  int merge_partner = -1;         // index into the group list, -1 when free
};

class ScenarioState {
 public:
  ScenarioState(const SynthConfig& config) : cfg_(config), rng_(config.seed) {
    if (cfg_.frames < 1 || cfg_.n_groups < 1 || cfg_.agents_min < 1 ||
        cfg_.agents_max < cfg_.agents_min || cfg_.max_groups < cfg_.min_groups) {
      throw Error(ErrorCode::InvalidConfig, "bad scenario shape parameters");
    }
    for (double p : {cfg_.merge_prob, cfg_.split_prob, cfg_.spawn_prob, cfg_.death_prob}) {
      if (p < 0.0 || p > 1.0) {
        throw Error(ErrorCode::InvalidConfig, "event probabilities must be in [0,1]");
      }
    }
    if (cfg_.group_speed < 0.0 || cfg_.jitter_sigma < 0.0 || cfg_.heading_sigma < 0.0 ||
        cfg_.wobble_sigma < 0.0 || cfg_.turn_rate < 0.0) {
      throw Error(ErrorCode::InvalidConfig, "speeds and sigmas must be >= 0");
    }
    for (int g = 0; g < cfg_.n_groups; ++g) spawn_group();
  }

  SynthResult run() {
    SynthResult result;
    result.frames.reserve(static_cast<std::size_t>(cfg_.frames));
    for (std::int64_t t = 0; t < cfg_.frames; ++t) {
      apply_scripted(t, result.events);
      apply_random(t, result.events);
      step_groups();
      result.frames.push_back(emit(t));
    }
    return result;
  }

 private:
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }

  double gaussian(double sigma) {
    if (sigma <= 0.0) return 0.0;
    return std::normal_distribution<double>(0.0, sigma)(rng_);
  }

  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }

  bool coin(double p) {
    if (p <= 0.0) return false;
    return std::bernoulli_distribution(p)(rng_);
  }

  void spawn_group() {
    Group g;
    g.center = Vec2{uniform(0.1, 0.9), uniform(0.1, 0.9)};
    g.heading = uniform(0.0, 2.0 * std::numbers::pi);
    if (cfg_.turn_rate > 0.0) {
      g.turn = coin(0.5) ? cfg_.turn_rate : -cfg_.turn_rate;
    }
    const int members = uniform_int(cfg_.agents_min, cfg_.agents_max);
    g.offsets.reserve(static_cast<std::size_t>(members));
    for (int m = 0; m < members; ++m) {
      g.offsets.push_back(Vec2{gaussian(cfg_.jitter_sigma), gaussian(cfg_.jitter_sigma)});
    }
    groups_.push_back(std::move(g));
  }

  bool is_free(const Group& g) const { return g.merge_partner < 0 && g.diverge_left == 0; }

  std::vector<int> free_indices() const {
    std::vector<int> idx;
    for (std::size_t i = 0; i < groups_.size(); ++i) {
      if (is_free(groups_[i])) idx.push_back(static_cast<int>(i));
    }
    return idx;
  }

  // Splits the group into two halves heading apart at right angles to the
  // original direction.
  bool do_split(bool scripted) {
    int best = -1;
    std::size_t best_members = 3;  // need at least 4 members to fork 2+2
    if (scripted) {
      for (std::size_t i = 0; i < groups_.size(); ++i) {
        if (is_free(groups_[i]) && groups_[i].offsets.size() > best_members) {
          best = static_cast<int>(i);
          best_members = groups_[i].offsets.size();
        }
      }
    } else {
      std::vector<int> candidates;
      for (std::size_t i = 0; i < groups_.size(); ++i) {
        if (is_free(groups_[i]) && groups_[i].offsets.size() >= 4) {
          candidates.push_back(static_cast<int>(i));
        }
      }
      if (!candidates.empty()) {
        best = candidates[static_cast<std::size_t>(
            uniform_int(0, static_cast<int>(candidates.size()) - 1))];
      }
    }
    if (best < 0 || static_cast<int>(groups_.size()) >= cfg_.max_groups) return false;

    Group& src = groups_[static_cast<std::size_t>(best)];
    Group forked;
    forked.center = src.center;
    const std::size_t half = src.offsets.size() / 2;
    forked.offsets.assign(src.offsets.begin() + static_cast<std::ptrdiff_t>(half),
                          src.offsets.end());
    src.offsets.resize(half);
    forked.heading = src.heading + std::numbers::pi / 2.0;
    src.heading -= std::numbers::pi / 2.0;
    forked.turn = -src.turn;
    forked.diverge_left = cfg_.diverge_frames;
    src.diverge_left = cfg_.diverge_frames;
    groups_.push_back(std::move(forked));
    return true;
  }

  // Pairs two groups and steers them toward each other until they fuse.
  bool do_merge(bool scripted) {
    std::vector<int> free = free_indices();
    if (free.size() < 2 || static_cast<int>(groups_.size()) <= cfg_.min_groups) return false;
    int a = -1, b = -1;
    if (scripted) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < free.size(); ++i) {
        for (std::size_t j = i + 1; j < free.size(); ++j) {
          const double d = distance(groups_[static_cast<std::size_t>(free[i])].center,
                                    groups_[static_cast<std::size_t>(free[j])].center);
          if (d < best) {
            best = d;
            a = free[i];
            b = free[j];
          }
        }
      }
    } else {
      const int i = uniform_int(0, static_cast<int>(free.size()) - 1);
      int j = uniform_int(0, static_cast<int>(free.size()) - 2);
      if (j >= i) ++j;
      a = free[static_cast<std::size_t>(i)];
      b = free[static_cast<std::size_t>(j)];
    }
    if (a < 0 || b < 0) return false;
    groups_[static_cast<std::size_t>(a)].merge_partner = b;
    groups_[static_cast<std::size_t>(b)].merge_partner = a;
    return true;
  }

  bool do_spawn() {
    if (static_cast<int>(groups_.size()) >= cfg_.max_groups) return false;
    spawn_group();
    return true;
  }

  bool do_death() {
    std::vector<int> free = free_indices();
    if (free.empty() || static_cast<int>(groups_.size()) <= cfg_.min_groups) return false;
    const int victim = free[static_cast<std::size_t>(
        uniform_int(0, static_cast<int>(free.size()) - 1))];
    remove_group(victim);
    return true;
  }

  void remove_group(int idx) {
    groups_.erase(groups_.begin() + idx);
    for (Group& g : groups_) {
      if (g.merge_partner == idx) g.merge_partner = -1;
      else if (g.merge_partner > idx) --g.merge_partner;
    }
  }

  void apply_scripted(std::int64_t t, std::vector<SynthEvent>& log) {
    for (const ScriptedEvent& ev : cfg_.scripted) {
      if (ev.frame != t) continue;
      bool applied = false;
      switch (ev.kind) {
        case EventKind::Split: applied = do_split(true); break;
        case EventKind::Merge: applied = do_merge(true); break;
        case EventKind::Spawn: applied = do_spawn(); break;
        case EventKind::Death: applied = do_death(); break;
      }
      if (applied) log.push_back(SynthEvent{t, ev.kind, true});
    }
  }

  void apply_random(std::int64_t t, std::vector<SynthEvent>& log) {
    if (coin(cfg_.split_prob) && do_split(false)) log.push_back(SynthEvent{t, EventKind::Split, false});
    if (coin(cfg_.merge_prob) && do_merge(false)) log.push_back(SynthEvent{t, EventKind::Merge, false});
    if (coin(cfg_.spawn_prob) && do_spawn()) log.push_back(SynthEvent{t, EventKind::Spawn, false});
    if (coin(cfg_.death_prob) && do_death()) log.push_back(SynthEvent{t, EventKind::Death, false});
  }

  void step_groups() {
    // Move every group, then resolve finished merges.
    for (std::size_t i = 0; i < groups_.size(); ++i) {
      Group& g = groups_[i];
      if (g.merge_partner >= 0) {
        const Group& other = groups_[static_cast<std::size_t>(g.merge_partner)];
        g.heading = std::atan2(other.center.y - g.center.y, other.center.x - g.center.x);
      } else if (g.diverge_left > 0) {
        --g.diverge_left;  // hold heading
      } else {
        g.heading += g.turn + gaussian(cfg_.heading_sigma);
      }
      advance(g);
    }
    for (std::size_t i = 0; i < groups_.size(); ++i) {
      const int partner = groups_[i].merge_partner;
      if (partner < 0 || partner <= static_cast<int>(i)) continue;
      Group& a = groups_[i];
      Group& b = groups_[static_cast<std::size_t>(partner)];
      if (distance(a.center, b.center) > kFuseDistance) continue;
      const Vec2 mid{(a.center.x + b.center.x) / 2.0, (a.center.y + b.center.y) / 2.0};
      for (Vec2& off : a.offsets) {
        off.x += a.center.x - mid.x;
        off.y += a.center.y - mid.y;
      }
      for (const Vec2& off : b.offsets) {
        a.offsets.push_back(Vec2{off.x + b.center.x - mid.x, off.y + b.center.y - mid.y});
      }
      a.center = mid;
      a.merge_partner = -1;
      remove_group(partner);
    }
  }

  void advance(Group& g) {
    Vec2 next{g.center.x + cfg_.group_speed * std::cos(g.heading),
              g.center.y + cfg_.group_speed * std::sin(g.heading)};
    if (next.x < kCenterMargin || next.x > 1.0 - kCenterMargin) {
      g.heading = std::numbers::pi - g.heading;
      next.x = std::clamp(next.x, kCenterMargin, 1.0 - kCenterMargin);
    }
    if (next.y < kCenterMargin || next.y > 1.0 - kCenterMargin) {
      g.heading = -g.heading;
      next.y = std::clamp(next.y, kCenterMargin, 1.0 - kCenterMargin);
    }
    g.center = next;
  }

  Frame emit(std::int64_t t) {
    Frame frame;
    frame.index = t;
    frame.time_s = static_cast<double>(t) * cfg_.frame_dt;
    for (const Group& g : groups_) {
      for (const Vec2& off : g.offsets) {
        const double wx = gaussian(cfg_.wobble_sigma);
        const double wy = gaussian(cfg_.wobble_sigma);
        frame.agents.push_back(Vec2{std::clamp(g.center.x + off.x + wx, 0.0, 1.0),
                                    std::clamp(g.center.y + off.y + wy, 0.0, 1.0)});
      }
    }
    return validate_frame(frame);
  }

  const SynthConfig& cfg_;
  std::mt19937_64 rng_;
  std::vector<Group> groups_;
};

}  // namespace

SynthResult synth_scenario(const SynthConfig& config) {
  return ScenarioState(config).run();
}

std::vector<Frame> load_frames(const std::string& path, FrameFormat format,
                               double map_extent, double frame_dt) {
  if (!(map_extent > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "map extent must be positive");
  }
  const std::string text = read_text_file(path);
  std::vector<Frame> frames;

  if (format == FrameFormat::Jsonl) {
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
      ++line_no;
      if (line.empty()) continue;
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(line);
        Frame frame;
        frame.index = obj.at("t").get<std::int64_t>();
        for (const auto& a : obj.at("agents")) {
          frame.agents.push_back(
              Vec2{a.at(0).get<double>() / map_extent, a.at(1).get<double>() / map_extent});
        }
        frames.push_back(std::move(frame));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError,
                    path + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
  } else {
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    // frame index -> agents, built in file order then flattened
    std::vector<std::pair<std::int64_t, std::vector<Vec2>>> by_index;
    while (std::getline(lines, line)) {
      ++line_no;
      if (line.empty()) continue;
      if (line_no == 1 && line.find_first_not_of("txyplaer, \r") == std::string::npos) {
        continue;  // header row
      }
      std::istringstream cells(line);
      std::string cell;
      std::vector<std::string> row;
      while (std::getline(cells, cell, ',')) row.push_back(cell);
      if (row.size() < 3) {
        throw Error(ErrorCode::ParseError,
                    path + ":" + std::to_string(line_no) + ": expected t,x,y[,player]");
      }
      try {
        const std::int64_t t = std::stoll(row[0]);
        const Vec2 p{std::stod(row[1]) / map_extent, std::stod(row[2]) / map_extent};
        auto it = std::find_if(by_index.begin(), by_index.end(),
                               [t](const auto& e) { return e.first == t; });
        if (it == by_index.end()) {
          by_index.push_back({t, {p}});
        } else {
          it->second.push_back(p);
        }
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError,
                    path + ":" + std::to_string(line_no) + ": bad number");
      }
    }
    frames.reserve(by_index.size());
    for (auto& [t, agents] : by_index) {
      Frame frame;
      frame.index = t;
      frame.agents = std::move(agents);
      frames.push_back(std::move(frame));
    }
  }

  std::stable_sort(frames.begin(), frames.end(),
                   [](const Frame& a, const Frame& b) { return a.index < b.index; });
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].index == frames[i - 1].index) {
      throw Error(ErrorCode::DuplicateFrame,
                  path + ": frame index " + std::to_string(frames[i].index) + " repeats");
    }
  }
  for (Frame& f : frames) {
    f.time_s = static_cast<double>(f.index) * frame_dt;
    validate_frame(f);
  }
  return frames;
}

void save_frames_jsonl(const std::vector<Frame>& frames, const std::string& path,
                       double map_extent) {
  std::ostringstream out;
  for (const Frame& f : frames) {
    out << "{\"t\":" << f.index << ",\"agents\":[";
    for (std::size_t i = 0; i < f.agents.size(); ++i) {
      if (i > 0) out << ',';
      out << '[' << format_double(f.agents[i].x * map_extent) << ','
          << format_double(f.agents[i].y * map_extent) << ']';
    }
    out << "]}\n";
  }
  write_text_file(path, out.str());
}

void save_events_jsonl(const std::vector<SynthEvent>& events, const std::string& path) {
  std::ostringstream out;
  for (const SynthEvent& e : events) {
    out << "{\"frame\":" << e.frame << ",\"kind\":\"" << event_name(e.kind)
        << "\",\"scripted\":" << (e.scripted ? "true" : "false") << "}\n";
  }
  write_text_file(path, out.str());
}

std::vector<SynthEvent> load_events_jsonl(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<SynthEvent> events;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const nlohmann::json obj = nlohmann::json::parse(line);
      events.push_back(SynthEvent{obj.at("frame").get<std::int64_t>(),
                                  parse_event_kind(obj.at("kind").get<std::string>()),
                                  obj.at("scripted").get<bool>()});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return events;
}

DatasetSplit chunk_and_split(const std::vector<Frame>& frames, int chunk_len,
                             std::array<int, 3> ratios) {
  if (chunk_len < 1) {
    throw Error(ErrorCode::InvalidConfig, "chunk_len must be >= 1");
  }
  const int ratio_sum = ratios[0] + ratios[1] + ratios[2];
  if (ratios[0] < 1 || ratios[1] < 0 || ratios[2] < 0 || ratio_sum < 1) {
    throw Error(ErrorCode::InvalidConfig, "bad split ratios");
  }
  const std::int64_t n_chunks = static_cast<std::int64_t>(frames.size()) / chunk_len;
  if (n_chunks < 1) {
    throw Error(ErrorCode::TooFewFrames,
                std::to_string(frames.size()) + " frames cannot fill a chunk of " +
                    std::to_string(chunk_len));
  }
  const std::int64_t train_n = n_chunks * ratios[0] / ratio_sum;
  const std::int64_t val_n = n_chunks * ratios[1] / ratio_sum;

  DatasetSplit split;
  for (std::int64_t c = 0; c < n_chunks; ++c) {
    Chunk chunk;
    chunk.id = static_cast<int>(c);
    chunk.tag = (c < train_n) ? SplitTag::Train
                              : (c < train_n + val_n ? SplitTag::Val : SplitTag::Test);
    const std::size_t begin = static_cast<std::size_t>(c) * static_cast<std::size_t>(chunk_len);
    chunk.frames.assign(frames.begin() + static_cast<std::ptrdiff_t>(begin),
                        frames.begin() + static_cast<std::ptrdiff_t>(begin + chunk_len));
    validate_chunk(chunk, chunk_len);
    switch (chunk.tag) {
      case SplitTag::Train: split.train.push_back(std::move(chunk)); break;
      case SplitTag::Val: split.val.push_back(std::move(chunk)); break;
      case SplitTag::Test: split.test.push_back(std::move(chunk)); break;
    }
  }
  return split;
}

std::vector<Chunk> all_chunks(const DatasetSplit& split) {
  std::vector<Chunk> chunks;
  chunks.reserve(split.train.size() + split.val.size() + split.test.size());
  for (const auto* part : {&split.train, &split.val, &split.test}) {
    chunks.insert(chunks.end(), part->begin(), part->end());
  }
  return chunks;
}

}  // namespace swarmcast
