#include "swarmcast/set_to_cluster.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include <nlohmann/json.hpp>

#include "swarmcast/io.hpp"
#include "swarmcast/metrics.hpp"

namespace swarmcast {

namespace {
constexpr int kCodebookFileVersion = 1;
}

Codebook init_codebook(int k, std::uint64_t seed, double min_radius) {
  if (k < 1) {
    throw Error(ErrorCode::InvalidK, "k must be >= 1, got " + std::to_string(k));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Codebook codebook;
  codebook.min_radius = min_radius;
  codebook.weights.resize(static_cast<std::size_t>(k));
  for (Vec2& w : codebook.weights) {
    w.x = uniform(rng);
    w.y = uniform(rng);
  }
  validate_codebook(codebook);
  return codebook;
}

WinnerResult winner(const Vec2& x, const Codebook& codebook) {
  validate_codebook(codebook);
  WinnerResult best{0, std::numeric_limits<double>::infinity()};
  for (int j = 0; j < codebook.k(); ++j) {
    const double d = distance(x, codebook.weights[static_cast<std::size_t>(j)]);
    if (d < best.distance) {
      best.neuron_index = j;
      best.distance = d;
    }
  }
  return best;
}

StateVector agent_state(const Vec2& x, const Codebook& codebook, double min_radius) {
  const WinnerResult win = winner(x, codebook);
  StateVector state = StateVector::Zero(codebook.k());
  state[win.neuron_index] = std::max(min_radius, win.distance);
  return state;
}

StateVector encode_frame(const Frame& frame, const Codebook& codebook, double min_radius) {
  validate_codebook(codebook);
  StateVector pooled = StateVector::Zero(codebook.k());
  for (const Vec2& agent : frame.agents) {
    const WinnerResult win = winner(agent, codebook);
    pooled[win.neuron_index] =
        std::max(pooled[win.neuron_index], std::max(min_radius, win.distance));
  }
  return pooled;
}

std::vector<StateVector> encode_frames(const std::vector<Frame>& frames,
                                       const Codebook& codebook, double min_radius) {
  std::vector<StateVector> states;
  states.reserve(frames.size());
  for (const Frame& f : frames) {
    states.push_back(encode_frame(f, codebook, min_radius));
  }
  return states;
}

Codebook hebbian_update(const std::vector<Frame>& frames, const Codebook& codebook,
                        double learning_rate, bool* empty_batch) {
  validate_codebook(codebook);
  if (!(learning_rate > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "learning rate must be positive");
  }
  const int k = codebook.k();
  std::vector<double> sum_x(static_cast<std::size_t>(k), 0.0);
  std::vector<double> sum_y(static_cast<std::size_t>(k), 0.0);
  std::vector<std::int64_t> count(static_cast<std::size_t>(k), 0);
  std::int64_t total_agents = 0;
  for (const Frame& frame : frames) {
    for (const Vec2& agent : frame.agents) {
      const int j = winner(agent, codebook).neuron_index;
      sum_x[static_cast<std::size_t>(j)] += agent.x;
      sum_y[static_cast<std::size_t>(j)] += agent.y;
      ++count[static_cast<std::size_t>(j)];
      ++total_agents;
    }
  }
  if (empty_batch != nullptr) {
    *empty_batch = (total_agents == 0);
  }
  if (total_agents == 0) {
    return codebook;
  }
  Codebook updated = codebook;
  const double scale = learning_rate / static_cast<double>(total_agents);
  for (int j = 0; j < k; ++j) {
    const std::size_t sj = static_cast<std::size_t>(j);
    if (count[sj] == 0) continue;
    const double n = static_cast<double>(count[sj]);
    Vec2& w = updated.weights[sj];
    // dw_j = (eta/N) * (sum_{i in C_j} x_i - |C_j| w_j)
    w.x += scale * (sum_x[sj] - n * w.x);
    w.y += scale * (sum_y[sj] - n * w.y);
  }
  validate_codebook(updated);
  return updated;
}

CodebookTrainResult train_codebook(const std::vector<Frame>& frames,
                                   const HebbianConfig& config,
                                   const std::vector<Frame>& heldout) {
  if (config.batch_frames < 1) {
    throw Error(ErrorCode::InvalidConfig, "batch_frames must be >= 1");
  }
  if (config.epochs < 0) {
    throw Error(ErrorCode::InvalidConfig, "epochs must be >= 0");
  }
  bool any_agent = false;
  for (const Frame& f : frames) {
    if (!f.agents.empty()) {
      any_agent = true;
      break;
    }
  }
  if (!any_agent) {
    throw Error(ErrorCode::NoAgents, "all training frames are empty");
  }
  const std::vector<Frame>& eval = heldout.empty() ? frames : heldout;

  CodebookTrainResult result;
  result.codebook = init_codebook(config.k, config.seed, config.min_radius);
  result.avg_distance_history.push_back(avg_distance(eval, result.codebook));

  const std::size_t batch = static_cast<std::size_t>(config.batch_frames);
  std::vector<Frame> window;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t start = 0; start < frames.size(); start += batch) {
      const std::size_t stop = std::min(frames.size(), start + batch);
      window.assign(frames.begin() + static_cast<std::ptrdiff_t>(start),
                    frames.begin() + static_cast<std::ptrdiff_t>(stop));
      bool empty = false;
      result.codebook = hebbian_update(window, result.codebook, config.learning_rate, &empty);
      if (empty) ++result.empty_batches;
    }
    result.avg_distance_history.push_back(avg_distance(eval, result.codebook));
  }
  return result;
}

ClusterConfig decode(const StateVector& state, const Codebook& codebook, double threshold,
                     std::int64_t source_frame) {
  validate_codebook(codebook);
  if (state.size() != codebook.k()) {
    throw Error(ErrorCode::LengthMismatch,
                "state has " + std::to_string(state.size()) + " entries, codebook has k=" +
                    std::to_string(codebook.k()));
  }
  ClusterConfig config;
  config.source_frame = source_frame;
  for (int i = 0; i < codebook.k(); ++i) {
    if (state[i] > threshold) {
      config.clusters.push_back(Cluster{codebook.weights[static_cast<std::size_t>(i)],
                                        std::max(codebook.min_radius, state[i])});
    }
  }
  return config;
}

void save_codebook(const Codebook& codebook, const std::string& path) {
  validate_codebook(codebook);
  nlohmann::ordered_json doc;
  doc["format"] = "swarmcast-codebook";
  doc["version"] = kCodebookFileVersion;
  doc["k"] = codebook.k();
  doc["min_radius"] = codebook.min_radius;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const Vec2& w : codebook.weights) {
    rows.push_back({w.x, w.y});
  }
  doc["weights"] = std::move(rows);
  write_text_file(path, doc.dump(2) + "\n");
}

Codebook load_codebook(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptFile, path + ": " + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "swarmcast-codebook") {
      throw Error(ErrorCode::CorruptFile, path + ": not a codebook file");
    }
    if (doc.at("version").get<int>() != kCodebookFileVersion) {
      throw Error(ErrorCode::VersionMismatch,
                  path + ": unsupported codebook version " + doc["version"].dump());
    }
    Codebook codebook;
    codebook.min_radius = doc.at("min_radius").get<double>();
    const auto& rows = doc.at("weights");
    codebook.weights.reserve(rows.size());
    for (const auto& row : rows) {
      codebook.weights.push_back(Vec2{row.at(0).get<double>(), row.at(1).get<double>()});
    }
    if (codebook.k() != doc.at("k").get<int>()) {
      throw Error(ErrorCode::CorruptFile, path + ": k does not match weight rows");
    }
    validate_codebook(codebook);
    return codebook;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptFile, path + ": " + e.what());
  }
}

}  // namespace swarmcast
