// swarmcast: learn spatial cluster centroids over agent position streams,
// encode frames as cluster-radius state vectors, and forecast how the
// cluster configuration evolves.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "swarmcast/data.hpp"
#include "swarmcast/forecaster.hpp"
#include "swarmcast/io.hpp"
#include "swarmcast/kmeans.hpp"
#include "swarmcast/manifest.hpp"
#include "swarmcast/metrics.hpp"
#include "swarmcast/set_to_cluster.hpp"
#include "swarmcast/svg.hpp"

using namespace swarmcast;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SWARM_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring non-numeric SWARM_SEED='" << env << "'\n";
    }
  }
  return 0;
}

FrameFormat parse_format(const std::string& name) {
  if (name == "jsonl") return FrameFormat::Jsonl;
  if (name == "csv") return FrameFormat::Csv;
  throw Error(ErrorCode::InvalidConfig, "unknown frame format '" + name + "'");
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

std::vector<Chunk> select_chunks(const DatasetSplit& split, const std::string& which,
                                 int chunk_id) {
  std::vector<Chunk> chunks;
  if (which == "train") chunks = split.train;
  else if (which == "val") chunks = split.val;
  else if (which == "test") chunks = split.test;
  else if (which == "all") chunks = all_chunks(split);
  else throw Error(ErrorCode::InvalidConfig, "unknown split '" + which + "'");
  if (chunk_id >= 0) {
    std::vector<Chunk> one;
    for (const Chunk& c : chunks) {
      if (c.id == chunk_id) one.push_back(c);
    }
    if (one.empty()) {
      throw Error(ErrorCode::InvalidConfig,
                  "chunk " + std::to_string(chunk_id) + " is not in split '" + which + "'");
    }
    chunks = std::move(one);
  }
  return chunks;
}

// Shared frame-input flags.
struct FrameInput {
  std::string path;
  std::string format = "jsonl";
  double extent = 256.0;
  double frame_dt = 0.2;

  void attach(CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--frames", path, "frame file (JSONL or CSV)");
    if (required) opt->required();
    cmd->add_option("--format", format, "frame file format: jsonl|csv")
        ->check(CLI::IsMember({"jsonl", "csv"}));
    cmd->add_option("--extent", extent, "map extent used to normalize coordinates");
    cmd->add_option("--frame-dt", frame_dt, "seconds between frames");
  }

  std::vector<Frame> load() const {
    return load_frames(path, parse_format(format), extent, frame_dt);
  }
};

void write_loss_csv(const std::vector<EpochStats>& history, double lr,
                    const std::string& path) {
  std::ostringstream out;
  out << "epoch,train_loss,val_loss,lr\n";
  for (const EpochStats& e : history) {
    out << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.val_loss)
        << ',' << format_double(lr) << '\n';
  }
  write_text_file(path, out.str());
}

struct PredictionRecord {
  int chunk_id = 0;
  int step = 0;  // 1-based output index within the chunk
  std::int64_t frame = 0;
  std::string window;
  StateVector state;
};

std::vector<PredictionRecord> load_predictions(const std::string& path) {
  std::vector<PredictionRecord> records;
  std::istringstream lines(read_text_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const nlohmann::json obj = nlohmann::json::parse(line);
      PredictionRecord rec;
      rec.chunk_id = obj.at("chunk").get<int>();
      rec.step = obj.at("step").get<int>();
      rec.frame = obj.at("frame").get<std::int64_t>();
      rec.window = obj.at("window").get<std::string>();
      const auto& arr = obj.at("state");
      rec.state.resize(static_cast<Eigen::Index>(arr.size()));
      for (std::size_t i = 0; i < arr.size(); ++i) {
        rec.state[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
      }
      records.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

int cmd_synth(const SynthConfig& cfg, const std::string& out, const std::string& events_out,
              const std::vector<std::string>& argv) {
  Timer timer;
  DirectoryLock lock(out);
  const SynthResult result = synth_scenario(cfg);
  save_frames_jsonl(result.frames, out, 1.0);
  save_events_jsonl(result.events, events_out);

  RunManifest manifest;
  manifest.command = "synth";
  manifest.argv = argv;
  manifest.config = {{"n_groups", std::to_string(cfg.n_groups)},
                     {"agents_min", std::to_string(cfg.agents_min)},
                     {"agents_max", std::to_string(cfg.agents_max)},
                     {"group_speed", format_double(cfg.group_speed)},
                     {"heading_sigma", format_double(cfg.heading_sigma)},
                     {"merge_prob", format_double(cfg.merge_prob)},
                     {"split_prob", format_double(cfg.split_prob)},
                     {"spawn_prob", format_double(cfg.spawn_prob)},
                     {"death_prob", format_double(cfg.death_prob)},
                     {"jitter_sigma", format_double(cfg.jitter_sigma)},
                     {"frames", std::to_string(cfg.frames)},
                     {"diverge_frames", std::to_string(cfg.diverge_frames)}};
  manifest.seeds["seed"] = cfg.seed;
  manifest.outputs = {out, events_out};
  manifest.wall_time_s = timer.seconds();
  manifest.write(out);

  std::cout << "wrote " << result.frames.size() << " frames, " << result.events.size()
            << " events to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cluster-level learning and forecasting over agent position streams"};
  app.set_version_flag("--version", std::string(kVersionString));
  app.require_subcommand(1);
  std::vector<std::string> raw_args(argv, argv + argc);

  // ---- synth ----------------------------------------------------------
  auto* synth = app.add_subcommand("synth", "generate a synthetic multi-agent scenario");
  SynthConfig synth_cfg;
  synth_cfg.seed = default_seed();
  std::string synth_out = "frames.jsonl";
  std::string synth_events_out;
  std::vector<std::string> synth_events;
  synth->add_option("--out", synth_out, "output frames file (JSONL, extent 1.0)");
  synth->add_option("--events-out", synth_events_out,
                    "event log output (default: <out>.events.jsonl)");
  synth->add_option("--frames", synth_cfg.frames, "number of frames");
  synth->add_option("--groups", synth_cfg.n_groups, "initial group count");
  synth->add_option("--agents-min", synth_cfg.agents_min, "min agents per group");
  synth->add_option("--agents-max", synth_cfg.agents_max, "max agents per group");
  synth->add_option("--speed", synth_cfg.group_speed, "group speed per frame");
  synth->add_option("--heading-sigma", synth_cfg.heading_sigma, "heading noise per frame");
  synth->add_option("--jitter", synth_cfg.jitter_sigma, "member spread around group center");
  synth->add_option("--merge-prob", synth_cfg.merge_prob, "per-frame merge probability");
  synth->add_option("--split-prob", synth_cfg.split_prob, "per-frame split probability");
  synth->add_option("--spawn-prob", synth_cfg.spawn_prob, "per-frame spawn probability");
  synth->add_option("--death-prob", synth_cfg.death_prob, "per-frame death probability");
  synth->add_option("--min-groups", synth_cfg.min_groups, "lower bound on live groups");
  synth->add_option("--max-groups", synth_cfg.max_groups, "upper bound on live groups");
  synth->add_option("--diverge-frames", synth_cfg.diverge_frames,
                    "straight-line frames after a split");
  synth->add_option("--seed", synth_cfg.seed, "RNG seed (SWARM_SEED overrides the default)");
  synth->add_option("--event", synth_events,
                    "scripted event kind:frame, e.g. split:300 (repeatable)");

  // ---- train-clusters -------------------------------------------------
  auto* train_clusters = app.add_subcommand("train-clusters",
                                            "fit the winner-take-all codebook");
  FrameInput tc_frames;
  tc_frames.attach(train_clusters);
  HebbianConfig hebbian_cfg;
  hebbian_cfg.seed = default_seed();
  std::string tc_out = "codebook.json";
  std::string tc_history = "";
  std::string tc_split = "train";
  int tc_chunk_len = 50;
  train_clusters->add_option("--k", hebbian_cfg.k, "neuron count");
  train_clusters->add_option("--lr", hebbian_cfg.learning_rate, "Hebbian learning rate");
  train_clusters->add_option("--batch-frames", hebbian_cfg.batch_frames,
                             "frames per weight update");
  train_clusters->add_option("--epochs", hebbian_cfg.epochs, "training epochs");
  train_clusters->add_option("--min-radius", hebbian_cfg.min_radius, "cluster radius floor");
  train_clusters->add_option("--seed", hebbian_cfg.seed, "codebook init seed");
  train_clusters->add_option("--out", tc_out, "codebook output file");
  train_clusters->add_option("--history", tc_history,
                             "per-epoch held-out average-distance CSV");
  train_clusters->add_option("--split", tc_split,
                             "frames to train on: train (with val held out) or all")
      ->check(CLI::IsMember({"train", "all"}));
  train_clusters->add_option("--chunk-len", tc_chunk_len, "frames per chunk for the split");

  // ---- encode ---------------------------------------------------------
  auto* encode = app.add_subcommand("encode", "encode frames to state vectors");
  FrameInput enc_frames;
  enc_frames.attach(encode);
  std::string enc_codebook;
  std::string enc_out = "states.csv";
  encode->add_option("--codebook", enc_codebook, "codebook file")->required();
  encode->add_option("--out", enc_out, "state-vector CSV output");

  // ---- train-forecaster ----------------------------------------------
  auto* train_fc = app.add_subcommand("train-forecaster",
                                      "train the recurrent cluster forecaster");
  FrameInput fc_frames;
  fc_frames.attach(train_fc);
  std::string fc_codebook;
  std::string fc_states;
  std::string fc_out = "model.json";
  std::string fc_log;
  TrainConfig train_cfg;
  train_cfg.seed = default_seed();
  int fc_hidden = 64;
  train_fc->add_option("--codebook", fc_codebook, "codebook file")->required();
  train_fc->add_option("--states", fc_states,
                       "precomputed state CSV aligned with the frames file");
  train_fc->add_option("--out", fc_out, "model output file");
  train_fc->add_option("--log", fc_log, "per-epoch loss CSV");
  train_fc->add_option("--alpha", train_cfg.alpha, "radius scale in the loss");
  train_fc->add_option("--lr", train_cfg.lr, "Adam learning rate");
  train_fc->add_option("--batch", train_cfg.batch_chunks, "chunks per batch");
  train_fc->add_option("--epochs", train_cfg.epochs, "training epochs");
  train_fc->add_option("--observe", train_cfg.observe_len, "observation window length");
  train_fc->add_option("--predict", train_cfg.predict_len, "prediction window length");
  train_fc->add_option("--hidden", fc_hidden, "recurrent hidden width");
  train_fc->add_option("--grad-clip", train_cfg.grad_clip,
                       "global gradient-norm clip, <=0 disables");
  train_fc->add_flag("--scale-prediction-only", train_cfg.scale_prediction_only,
                     "scale only the prediction term in the loss");
  train_fc->add_option("--seed", train_cfg.seed, "init and batch-order seed");

  // ---- predict --------------------------------------------------------
  auto* predict = app.add_subcommand("predict", "roll the forecaster over chunks");
  FrameInput pr_frames;
  pr_frames.attach(predict);
  std::string pr_model, pr_codebook, pr_states;
  std::string pr_out = "predictions.jsonl";
  std::string pr_split = "test";
  int pr_chunk = -1;
  int pr_observe = 25, pr_predict = 25;
  double pr_threshold = kDefaultDecodeThreshold;
  predict->add_option("--model", pr_model, "model file")->required();
  predict->add_option("--codebook", pr_codebook, "codebook file")->required();
  predict->add_option("--states", pr_states, "precomputed state CSV");
  predict->add_option("--out", pr_out, "predictions JSONL output");
  predict->add_option("--split", pr_split, "chunk selection: train|val|test|all");
  predict->add_option("--chunk", pr_chunk, "restrict to one chunk id");
  predict->add_option("--observe", pr_observe, "observation window length");
  predict->add_option("--predict", pr_predict, "prediction horizon");
  predict->add_option("--threshold", pr_threshold, "decode threshold for cluster output");

  // ---- eval -----------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
  FrameInput ev_frames;
  ev_frames.attach(eval);
  std::string ev_pred, ev_codebook;
  std::string ev_out = "metrics.csv";
  double ev_alpha = 10.0;
  double ev_threshold = kDefaultDecodeThreshold;
  int ev_observe = 25;
  eval->add_option("--pred", ev_pred, "predictions JSONL from `predict`")->required();
  eval->add_option("--codebook", ev_codebook, "codebook file")->required();
  eval->add_option("--out", ev_out, "metrics CSV output");
  eval->add_option("--alpha", ev_alpha, "scale for the scaled MSE rows");
  eval->add_option("--threshold", ev_threshold, "cluster-count threshold");
  eval->add_option("--observe", ev_observe, "observation window length");

  // ---- report ---------------------------------------------------------
  auto* report = app.add_subcommand("report", "render SVG snapshots and charts");
  std::string rp_kind = "snapshot";
  FrameInput rp_frames;
  rp_frames.attach(report, /*required=*/false);
  std::string rp_codebook, rp_states, rp_csv;
  std::string rp_out = "report.svg";
  std::int64_t rp_frame = 0;
  double rp_threshold = kDefaultDecodeThreshold;
  report->add_option("--kind", rp_kind, "snapshot | loss | per-step")
      ->check(CLI::IsMember({"snapshot", "loss", "per-step"}));
  report->add_option("--codebook", rp_codebook, "codebook file (snapshot)");
  report->add_option("--states", rp_states, "state CSV; frame states re-encoded if absent");
  report->add_option("--csv", rp_csv, "input CSV (loss or metrics file)");
  report->add_option("--frame", rp_frame, "frame index to draw (snapshot)");
  report->add_option("--threshold", rp_threshold, "decode threshold (snapshot)");
  report->add_option("--out", rp_out, "SVG output path");

  // ---- bench ----------------------------------------------------------
  auto* bench = app.add_subcommand("bench",
                                   "time encoder inference against Lloyd re-fitting");
  std::vector<int> bn_agents = {64, 128, 256};
  std::vector<int> bn_neurons = {16, 32, 64, 128};
  int bn_frames = 20;
  int bn_trials = 5;
  std::uint64_t bn_seed = default_seed();
  std::string bn_out = "bench.csv";
  bench->add_option("--agents", bn_agents, "agent counts to sweep");
  bench->add_option("--neurons", bn_neurons, "neuron counts to sweep");
  bench->add_option("--frames", bn_frames, "frames per measurement");
  bench->add_option("--trials", bn_trials, "trials per cell (median reported)");
  bench->add_option("--seed", bn_seed, "RNG seed");
  bench->add_option("--out", bn_out, "timing CSV output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      for (const std::string& spec : synth_events) {
        const std::size_t colon = spec.find(':');
        if (colon == std::string::npos) {
          throw Error(ErrorCode::InvalidConfig,
                      "expected kind:frame in --event, got '" + spec + "'");
        }
        synth_cfg.scripted.push_back(ScriptedEvent{
            std::stoll(spec.substr(colon + 1)), parse_event_kind(spec.substr(0, colon))});
      }
      if (synth_events_out.empty()) synth_events_out = synth_out + ".events.jsonl";
      return cmd_synth(synth_cfg, synth_out, synth_events_out, raw_args);
    }

    if (train_clusters->parsed()) {
      Timer timer;
      DirectoryLock lock(tc_out);
      const std::vector<Frame> frames = tc_frames.load();
      std::vector<Frame> fit_frames;
      std::vector<Frame> heldout;
      if (tc_split == "train") {
        const DatasetSplit split = chunk_and_split(frames, tc_chunk_len);
        for (const Chunk& c : split.train) {
          fit_frames.insert(fit_frames.end(), c.frames.begin(), c.frames.end());
        }
        for (const Chunk& c : split.val) {
          heldout.insert(heldout.end(), c.frames.begin(), c.frames.end());
        }
      } else {
        fit_frames = frames;
      }
      const CodebookTrainResult result = train_codebook(fit_frames, hebbian_cfg, heldout);
      if (result.empty_batches > 0) {
        std::cerr << "warning: " << result.empty_batches << " empty batches skipped\n";
      }
      save_codebook(result.codebook, tc_out);
      if (!tc_history.empty()) {
        std::ostringstream hist;
        hist << "epoch,avg_distance\n";
        for (std::size_t e = 0; e < result.avg_distance_history.size(); ++e) {
          hist << e << ',' << format_double(result.avg_distance_history[e]) << '\n';
        }
        write_text_file(tc_history, hist.str());
      }

      RunManifest manifest;
      manifest.command = "train-clusters";
      manifest.argv = raw_args;
      manifest.config = {{"k", std::to_string(hebbian_cfg.k)},
                         {"lr", format_double(hebbian_cfg.learning_rate)},
                         {"batch_frames", std::to_string(hebbian_cfg.batch_frames)},
                         {"epochs", std::to_string(hebbian_cfg.epochs)},
                         {"min_radius", format_double(hebbian_cfg.min_radius)},
                         {"split", tc_split},
                         {"extent", format_double(tc_frames.extent)}};
      manifest.seeds["seed"] = hebbian_cfg.seed;
      manifest.inputs = {tc_frames.path};
      manifest.outputs = {tc_out};
      if (!tc_history.empty()) manifest.outputs.push_back(tc_history);
      manifest.wall_time_s = timer.seconds();
      manifest.write(tc_out);

      std::cout << "codebook k=" << hebbian_cfg.k << " trained on " << fit_frames.size()
                << " frames; held-out avg distance "
                << format_double(result.avg_distance_history.front()) << " -> "
                << format_double(result.avg_distance_history.back()) << "\n";
      return 0;
    }

    if (encode->parsed()) {
      Timer timer;
      DirectoryLock lock(enc_out);
      const std::vector<Frame> frames = enc_frames.load();
      const Codebook codebook = load_codebook(enc_codebook);
      if (frames.empty()) {
        std::cerr << "warning: no frames in " << enc_frames.path << ", writing empty states\n";
      }
      const std::vector<StateVector> states =
          encode_frames(frames, codebook, codebook.min_radius);
      save_states_csv(states, enc_out);

      RunManifest manifest;
      manifest.command = "encode";
      manifest.argv = raw_args;
      manifest.config = {{"extent", format_double(enc_frames.extent)}};
      manifest.inputs = {enc_frames.path, enc_codebook};
      manifest.outputs = {enc_out};
      manifest.wall_time_s = timer.seconds();
      manifest.write(enc_out);
      std::cout << "encoded " << states.size() << " frames at k=" << codebook.k() << "\n";
      return 0;
    }

    if (train_fc->parsed()) {
      Timer timer;
      DirectoryLock lock(fc_out);
      const std::vector<Frame> frames = fc_frames.load();
      const Codebook codebook = load_codebook(fc_codebook);
      const int chunk_len = train_cfg.observe_len + train_cfg.predict_len;
      const DatasetSplit split = chunk_and_split(frames, chunk_len);

      std::vector<StateSeq> train_seqs, val_seqs;
      if (!fc_states.empty()) {
        const std::vector<StateVector> states = load_states_csv(fc_states);
        if (states.size() != frames.size()) {
          throw Error(ErrorCode::LengthMismatch,
                      "states file rows do not match frame count");
        }
        auto take = [&](const std::vector<Chunk>& chunks, std::vector<StateSeq>& out) {
          for (const Chunk& c : chunks) {
            const std::size_t base =
                static_cast<std::size_t>(c.id) * static_cast<std::size_t>(chunk_len);
            out.emplace_back(states.begin() + static_cast<std::ptrdiff_t>(base),
                             states.begin() + static_cast<std::ptrdiff_t>(base + chunk_len));
          }
        };
        take(split.train, train_seqs);
        take(split.val, val_seqs);
      } else {
        train_seqs = encode_chunk_states(split.train, codebook);
        val_seqs = encode_chunk_states(split.val, codebook);
      }

      ForecastModel model = build_model(codebook.k(), train_cfg.seed, fc_hidden);
      const TrainResult result = train_on_states(model, train_seqs, val_seqs, train_cfg);
      save_model(model, fc_out);
      if (!fc_log.empty()) write_loss_csv(result.history, train_cfg.lr, fc_log);

      RunManifest manifest;
      manifest.command = "train-forecaster";
      manifest.argv = raw_args;
      manifest.config = {{"alpha", format_double(train_cfg.alpha)},
                         {"lr", format_double(train_cfg.lr)},
                         {"batch", std::to_string(train_cfg.batch_chunks)},
                         {"epochs", std::to_string(train_cfg.epochs)},
                         {"observe", std::to_string(train_cfg.observe_len)},
                         {"predict", std::to_string(train_cfg.predict_len)},
                         {"hidden", std::to_string(fc_hidden)},
                         {"grad_clip", format_double(train_cfg.grad_clip)},
                         {"best_epoch", std::to_string(result.best_epoch)}};
      manifest.seeds["seed"] = train_cfg.seed;
      manifest.inputs = {fc_frames.path, fc_codebook};
      if (!fc_states.empty()) manifest.inputs.push_back(fc_states);
      manifest.outputs = {fc_out};
      if (!fc_log.empty()) manifest.outputs.push_back(fc_log);
      manifest.wall_time_s = timer.seconds();
      manifest.write(fc_out);

      if (!result.history.empty()) {
        std::cout << "trained " << result.history.size() << " epochs; best epoch "
                  << result.best_epoch << " val loss "
                  << format_double(result.history[static_cast<std::size_t>(
                                                      result.best_epoch - 1)]
                                       .val_loss)
                  << "; parameters: " << model.param_formula() << "\n";
      }
      return 0;
    }

    if (predict->parsed()) {
      Timer timer;
      DirectoryLock lock(pr_out);
      const std::vector<Frame> frames = pr_frames.load();
      const Codebook codebook = load_codebook(pr_codebook);
      const ForecastModel model = load_model(pr_model);
      if (model.k != codebook.k()) {
        throw Error(ErrorCode::LengthMismatch,
                    "model k=" + std::to_string(model.k) + " does not match codebook k=" +
                        std::to_string(codebook.k()));
      }
      const int chunk_len = pr_observe + pr_predict;
      const DatasetSplit split = chunk_and_split(frames, chunk_len);
      const std::vector<Chunk> chunks = select_chunks(split, pr_split, pr_chunk);

      std::optional<std::vector<StateVector>> states;
      if (!pr_states.empty()) {
        states = load_states_csv(pr_states);
        if (states->size() != frames.size()) {
          throw Error(ErrorCode::LengthMismatch, "states file rows do not match frame count");
        }
      }

      std::ostringstream out;
      for (const Chunk& chunk : chunks) {
        StateSeq truth;
        if (states) {
          const std::size_t base =
              static_cast<std::size_t>(chunk.id) * static_cast<std::size_t>(chunk_len);
          truth.assign(states->begin() + static_cast<std::ptrdiff_t>(base),
                       states->begin() + static_cast<std::ptrdiff_t>(base + chunk_len));
        } else {
          truth = encode_frames(chunk.frames, codebook, codebook.min_radius);
        }
        const StateSeq observed(truth.begin(), truth.begin() + pr_observe);
        const StateSeq predicted = rollout(model, observed, pr_predict, model.alpha);
        for (std::size_t j = 0; j < predicted.size(); ++j) {
          const std::size_t target_pos = j + 1;
          const ClusterConfig decoded =
              decode(predicted[j], codebook, pr_threshold, chunk.frames[target_pos].index);
          out << "{\"chunk\":" << chunk.id << ",\"step\":" << (j + 1)
              << ",\"frame\":" << chunk.frames[target_pos].index << ",\"window\":\""
              << (static_cast<int>(j) >= pr_observe - 1 ? "predict" : "observe")
              << "\",\"state\":[";
          for (Eigen::Index i = 0; i < predicted[j].size(); ++i) {
            if (i > 0) out << ',';
            out << format_double(predicted[j][i]);
          }
          out << "],\"clusters\":[";
          for (std::size_t ci = 0; ci < decoded.clusters.size(); ++ci) {
            if (ci > 0) out << ',';
            out << '[' << format_double(decoded.clusters[ci].centroid.x) << ','
                << format_double(decoded.clusters[ci].centroid.y) << ','
                << format_double(decoded.clusters[ci].radius) << ']';
          }
          out << "]}\n";
        }
      }
      write_text_file(pr_out, out.str());

      RunManifest manifest;
      manifest.command = "predict";
      manifest.argv = raw_args;
      manifest.config = {{"split", pr_split},
                         {"chunk", std::to_string(pr_chunk)},
                         {"observe", std::to_string(pr_observe)},
                         {"predict", std::to_string(pr_predict)},
                         {"threshold", format_double(pr_threshold)},
                         {"alpha", format_double(model.alpha)}};
      manifest.inputs = {pr_frames.path, pr_codebook, pr_model};
      manifest.outputs = {pr_out};
      manifest.wall_time_s = timer.seconds();
      manifest.write(pr_out);
      std::cout << "predicted " << chunks.size() << " chunks -> " << pr_out << "\n";
      return 0;
    }

    if (eval->parsed()) {
      Timer timer;
      DirectoryLock lock(ev_out);
      const std::vector<Frame> frames = ev_frames.load();
      const Codebook codebook = load_codebook(ev_codebook);
      const std::vector<PredictionRecord> records = load_predictions(ev_pred);
      if (records.empty()) {
        throw Error(ErrorCode::EmptyDataset, "no prediction records in " + ev_pred);
      }

      std::map<std::int64_t, const Frame*> frame_by_index;
      for (const Frame& f : frames) frame_by_index[f.index] = &f;

      std::vector<MetricRow> rows;
      double sum_scaled = 0.0, sum_unscaled = 0.0;
      double pred_window_sum = 0.0;
      std::size_t pred_window_count = 0;
      // Per-step averages across chunks, keyed by step index.
      std::map<int, std::pair<double, int>> per_step;

      // Persistence baseline per chunk: repeat the last observed state.
      std::map<int, StateVector> last_observed;
      double persistence_sum = 0.0;
      std::size_t persistence_count = 0;

      for (const PredictionRecord& rec : records) {
        const auto found = frame_by_index.find(rec.frame);
        if (found == frame_by_index.end()) {
          throw Error(ErrorCode::LengthMismatch,
                      "prediction for frame " + std::to_string(rec.frame) +
                          " has no ground truth");
        }
        const StateVector truth =
            encode_frame(*found->second, codebook, codebook.min_radius);
        if (truth.size() != rec.state.size()) {
          throw Error(ErrorCode::LengthMismatch, "prediction width does not match codebook");
        }
        const double unscaled = (rec.state - truth).squaredNorm() /
                                static_cast<double>(truth.size());
        const double scaled = ev_alpha * ev_alpha * unscaled;
        rows.push_back({rec.chunk_id, rec.frame, "mse_unscaled", unscaled});
        rows.push_back({rec.chunk_id, rec.frame, "mse_scaled", scaled});
        rows.push_back({rec.chunk_id, rec.frame, "clusters_pred",
                        static_cast<double>(cluster_count(rec.state, ev_threshold))});
        rows.push_back({rec.chunk_id, rec.frame, "clusters_true",
                        static_cast<double>(cluster_count(truth, ev_threshold))});
        sum_scaled += scaled;
        sum_unscaled += unscaled;
        per_step[rec.step].first += unscaled;
        per_step[rec.step].second += 1;

        if (rec.step == ev_observe - 1) {
          // The last teacher-forced output targets the final observed frame.
          last_observed[rec.chunk_id] = truth;
        }
        if (rec.window == "predict") {
          pred_window_sum += unscaled;
          ++pred_window_count;
          const auto persisted = last_observed.find(rec.chunk_id);
          if (persisted != last_observed.end()) {
            persistence_sum += (persisted->second - truth).squaredNorm() /
                               static_cast<double>(truth.size());
            ++persistence_count;
          }
        }
      }

      // Ground-truth clustering quality per frame covered by predictions.
      double silhouette_sum = 0.0;
      std::size_t silhouette_frames = 0, silhouette_skipped = 0;
      double distance_sum = 0.0;
      std::size_t distance_frames = 0;
      std::map<std::pair<int, std::int64_t>, bool> seen;
      for (const PredictionRecord& rec : records) {
        const std::pair<int, std::int64_t> key{rec.chunk_id, rec.frame};
        if (seen.count(key)) continue;
        seen[key] = true;
        const Frame& frame = *frame_by_index[rec.frame];
        if (!frame.agents.empty()) {
          distance_sum += avg_distance({frame}, codebook);
          ++distance_frames;
          rows.push_back({rec.chunk_id, rec.frame, "frame_distance",
                          avg_distance({frame}, codebook)});
        }
        const std::vector<int> labels = assign(frame.agents, codebook.weights);
        int distinct = 0;
        std::vector<bool> present(static_cast<std::size_t>(codebook.k()), false);
        for (int l : labels) {
          if (!present[static_cast<std::size_t>(l)]) {
            present[static_cast<std::size_t>(l)] = true;
            ++distinct;
          }
        }
        if (distinct >= 2) {
          const SilhouetteReport rep = silhouette(frame.agents, labels);
          rows.push_back({rec.chunk_id, rec.frame, "silhouette", rep.mean});
          silhouette_sum += rep.mean;
          ++silhouette_frames;
        } else {
          ++silhouette_skipped;
        }
      }

      const double n_records = static_cast<double>(records.size());
      rows.push_back({-1, -1, "mse_unscaled_mean", sum_unscaled / n_records});
      rows.push_back({-1, -1, "mse_scaled_mean", sum_scaled / n_records});
      if (pred_window_count > 0) {
        rows.push_back({-1, -1, "pred_window_mse_unscaled",
                        pred_window_sum / static_cast<double>(pred_window_count)});
      }
      if (persistence_count > 0) {
        rows.push_back({-1, -1, "persistence_pred_window_mse_unscaled",
                        persistence_sum / static_cast<double>(persistence_count)});
      }
      if (silhouette_frames > 0) {
        rows.push_back({-1, -1, "silhouette_mean",
                        silhouette_sum / static_cast<double>(silhouette_frames)});
      }
      rows.push_back({-1, -1, "silhouette_skipped_frames",
                      static_cast<double>(silhouette_skipped)});
      if (distance_frames > 0) {
        rows.push_back({-1, -1, "avg_distance",
                        distance_sum / static_cast<double>(distance_frames)});
      }
      for (const auto& [step, acc] : per_step) {
        rows.push_back({-1, step, "per_step_mse_unscaled_mean",
                        acc.first / static_cast<double>(acc.second)});
      }
      save_metrics_csv(rows, ev_out);

      RunManifest manifest;
      manifest.command = "eval";
      manifest.argv = raw_args;
      manifest.config = {{"alpha", format_double(ev_alpha)},
                         {"threshold", format_double(ev_threshold)},
                         {"observe", std::to_string(ev_observe)}};
      manifest.inputs = {ev_frames.path, ev_codebook, ev_pred};
      manifest.outputs = {ev_out};
      manifest.wall_time_s = timer.seconds();
      manifest.write(ev_out);
      std::cout << "evaluated " << records.size() << " predicted steps -> " << ev_out << "\n";
      return 0;
    }

    if (report->parsed()) {
      Timer timer;
      DirectoryLock lock(rp_out);
      std::string svg;
      std::vector<std::string> inputs;
      if (rp_kind == "snapshot") {
        if (rp_frames.path.empty() || rp_codebook.empty()) {
          throw Error(ErrorCode::InvalidConfig, "snapshot needs --frames and --codebook");
        }
        const std::vector<Frame> frames = rp_frames.load();
        const Codebook codebook = load_codebook(rp_codebook);
        const Frame* frame = nullptr;
        for (const Frame& f : frames) {
          if (f.index == rp_frame) frame = &f;
        }
        if (frame == nullptr) {
          throw Error(ErrorCode::InvalidConfig,
                      "frame " + std::to_string(rp_frame) + " not present");
        }
        StateVector state;
        if (!rp_states.empty()) {
          const std::vector<StateVector> states = load_states_csv(rp_states);
          std::size_t pos = 0;
          for (; pos < frames.size(); ++pos) {
            if (frames[pos].index == rp_frame) break;
          }
          if (pos >= states.size()) {
            throw Error(ErrorCode::LengthMismatch, "states file shorter than frame position");
          }
          state = states[pos];
          inputs.push_back(rp_states);
        } else {
          state = encode_frame(*frame, codebook, codebook.min_radius);
        }
        const ClusterConfig decoded = decode(state, codebook, rp_threshold, rp_frame);
        svg = render_snapshot_svg(*frame, codebook, decoded,
                                  "frame " + std::to_string(rp_frame) + ", " +
                                      std::to_string(decoded.clusters.size()) + " clusters");
        inputs.push_back(rp_frames.path);
        inputs.push_back(rp_codebook);
      } else if (rp_kind == "loss") {
        if (rp_csv.empty()) throw Error(ErrorCode::InvalidConfig, "loss report needs --csv");
        std::istringstream lines(read_text_file(rp_csv));
        std::string line;
        std::getline(lines, line);  // header
        Series train_series{"train", {}}, val_series{"val", {}};
        while (std::getline(lines, line)) {
          if (line.empty()) continue;
          std::istringstream cells(line);
          std::string cell;
          std::vector<std::string> row;
          while (std::getline(cells, cell, ',')) row.push_back(cell);
          if (row.size() < 3) continue;
          train_series.y.push_back(std::stod(row[1]));
          val_series.y.push_back(std::stod(row[2]));
        }
        svg = render_lines_svg({train_series, val_series}, "training and validation loss",
                               "epoch", "loss", true);
        inputs.push_back(rp_csv);
      } else {  // per-step
        if (rp_csv.empty()) throw Error(ErrorCode::InvalidConfig, "per-step report needs --csv");
        std::istringstream lines(read_text_file(rp_csv));
        std::string line;
        std::getline(lines, line);
        std::map<int, double> by_step;
        while (std::getline(lines, line)) {
          if (line.empty()) continue;
          std::istringstream cells(line);
          std::string cell;
          std::vector<std::string> row;
          while (std::getline(cells, cell, ',')) row.push_back(cell);
          if (row.size() < 4 || row[2] != "per_step_mse_unscaled_mean") continue;
          by_step[std::stoi(row[1])] = std::stod(row[3]);
        }
        if (by_step.empty()) {
          throw Error(ErrorCode::InvalidConfig,
                      "no per_step_mse_unscaled_mean rows in " + rp_csv);
        }
        Series s{"mse (unscaled)", {}};
        for (const auto& [step, value] : by_step) s.y.push_back(value);
        svg = render_lines_svg({s}, "per-step prediction error", "step", "mse", false);
        inputs.push_back(rp_csv);
      }
      write_text_file(rp_out, svg);

      RunManifest manifest;
      manifest.command = "report";
      manifest.argv = raw_args;
      manifest.config = {{"kind", rp_kind}};
      manifest.inputs = inputs;
      manifest.outputs = {rp_out};
      manifest.wall_time_s = timer.seconds();
      manifest.write(rp_out);
      std::cout << "wrote " << rp_out << "\n";
      return 0;
    }

    if (bench->parsed()) {
      Timer timer;
      DirectoryLock lock(bn_out);
      std::mt19937_64 rng(bn_seed);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      std::ostringstream out;
      out << "n,k,encode_us_per_frame,lloyd_us_per_frame,lloyd_iterations\n";
      for (int n : bn_agents) {
        std::vector<Frame> frames(static_cast<std::size_t>(bn_frames));
        for (std::size_t t = 0; t < frames.size(); ++t) {
          frames[t].index = static_cast<std::int64_t>(t);
          for (int a = 0; a < n; ++a) frames[t].agents.push_back(Vec2{u(rng), u(rng)});
        }
        for (int k : bn_neurons) {
          const Codebook codebook = init_codebook(k, bn_seed + static_cast<std::uint64_t>(k));
          const std::string before = [&] {
            std::ostringstream snap;
            for (const Vec2& w : codebook.weights) {
              snap << format_double(w.x) << ',' << format_double(w.y) << ';';
            }
            return snap.str();
          }();

          double encode_best = std::numeric_limits<double>::infinity();
          for (int trial = 0; trial < bn_trials; ++trial) {
            Timer t;
            for (const Frame& f : frames) {
              volatile double sink =
                  encode_frame(f, codebook, codebook.min_radius).sum();
              (void)sink;
            }
            encode_best = std::min(encode_best, t.seconds());
          }
          const std::string after = [&] {
            std::ostringstream snap;
            for (const Vec2& w : codebook.weights) {
              snap << format_double(w.x) << ',' << format_double(w.y) << ';';
            }
            return snap.str();
          }();
          if (before != after) {
            throw Error(ErrorCode::InvalidConfig, "encode_frame mutated the codebook");
          }

          double lloyd_best = std::numeric_limits<double>::infinity();
          long iterations = 0;
          for (int trial = 0; trial < bn_trials; ++trial) {
            Timer t;
            iterations = 0;
            for (const Frame& f : frames) {
              const KMeansResult km = lloyd(f.agents, k, codebook, 50, 1e-6);
              iterations += km.iterations;
            }
            lloyd_best = std::min(lloyd_best, t.seconds());
          }
          const double per_frame = 1e6 / static_cast<double>(bn_frames);
          out << n << ',' << k << ',' << format_double(encode_best * per_frame) << ','
              << format_double(lloyd_best * per_frame) << ','
              << format_double(static_cast<double>(iterations) /
                               static_cast<double>(bn_frames))
              << '\n';
        }
      }
      write_text_file(bn_out, out.str());

      const ForecastModel accounting = build_model(64, 0);
      std::cout << "prediction module parameters: " << accounting.param_formula() << "\n";
      std::cout << "set-to-cluster parameters (k=64 codebook): 64 x 2 = 128\n";
      std::cout << "encoder inference cost per frame: n*k distance evaluations, "
                   "no iterative re-fitting\n";

      RunManifest manifest;
      manifest.command = "bench";
      manifest.argv = raw_args;
      manifest.config = {{"frames", std::to_string(bn_frames)},
                         {"trials", std::to_string(bn_trials)}};
      manifest.seeds["seed"] = bn_seed;
      manifest.outputs = {bn_out};
      manifest.wall_time_s = timer.seconds();
      manifest.write(bn_out);
      std::cout << "wrote " << bn_out << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: Unexpected: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
