#include "swarmcast/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "swarmcast/io.hpp"
#include "swarmcast/set_to_cluster.hpp"

namespace swarmcast {

using nn::MatrixXd;
using nn::VectorXd;

namespace {

constexpr int kModelFileVersion = 1;

struct ScaleRule {
  double input = 1.0;   // multiplies ground-truth observation inputs
  double pred = 1.0;    // multiplies raw outputs inside the loss
  double target = 1.0;  // multiplies ground-truth targets inside the loss
  double emit = 1.0;    // maps raw outputs back to radius units

  static ScaleRule make(double alpha, bool scale_prediction_only) {
    ScaleRule r;
    if (scale_prediction_only) {
      r.input = 1.0;
      r.pred = alpha;
      r.target = 1.0;
      r.emit = alpha;
    } else {
      // Train entirely in alpha-scaled state space.
      r.input = alpha;
      r.pred = 1.0;
      r.target = alpha;
      r.emit = 1.0 / alpha;
    }
    return r;
  }
};

struct RolloutCache {
  std::vector<MatrixXd> inputs;  // u_t fed to the input projection
  std::vector<nn::LayerNorm::Cache> norm;
  std::vector<nn::LstmCell::StepCache> cell;
  std::vector<MatrixXd> hidden;
  std::vector<MatrixXd> outputs;  // raw model outputs per step
};

// Unrolled forward pass over a batch of sequences (states as columns).
// truth has observe_len + predict_len steps; the first observe_len - 1
// feed the model as ground truth, later inputs are the model's own raw
// outputs.
void forward_rollout(const ForecastModel& model, const std::vector<MatrixXd>& truth,
                     int observe_len, int predict_len, const ScaleRule& scale,
                     RolloutCache& cache) {
  const int total_steps = observe_len - 1 + predict_len;
  const Eigen::Index batch = truth.front().cols();
  cache.inputs.resize(static_cast<std::size_t>(total_steps));
  cache.norm.resize(static_cast<std::size_t>(total_steps));
  cache.cell.resize(static_cast<std::size_t>(total_steps));
  cache.hidden.resize(static_cast<std::size_t>(total_steps));
  cache.outputs.resize(static_cast<std::size_t>(total_steps));

  MatrixXd h = MatrixXd::Zero(model.hidden, batch);
  MatrixXd c = MatrixXd::Zero(model.hidden, batch);
  const int observed_inputs = observe_len - 1;
  for (int t = 0; t < total_steps; ++t) {
    const std::size_t st = static_cast<std::size_t>(t);
    cache.inputs[st] = (t < observed_inputs)
                           ? (scale.input * truth[st]).eval()
                           : cache.outputs[st - 1];
    MatrixXd projected = model.input_projection.forward(cache.inputs[st]);
    if (t < observed_inputs) {
      projected = model.obs_norm.forward(projected, cache.norm[st]);
    }
    MatrixXd h_next, c_next;
    model.cell.forward(projected, h, c, h_next, c_next, cache.cell[st]);
    h = h_next;
    c = c_next;
    cache.hidden[st] = h;
    cache.outputs[st] = model.output_projection.forward(h);
  }
}

// Per-element MSE across all output steps; fills d_outputs when requested.
double rollout_loss(const std::vector<MatrixXd>& truth, const RolloutCache& cache,
                    const ScaleRule& scale, std::vector<MatrixXd>* d_outputs) {
  const int total_steps = static_cast<int>(cache.outputs.size());
  const Eigen::Index k = truth.front().rows();
  const Eigen::Index batch = truth.front().cols();
  const double denom = static_cast<double>(total_steps) * static_cast<double>(k) *
                       static_cast<double>(batch);
  if (d_outputs != nullptr) {
    d_outputs->resize(static_cast<std::size_t>(total_steps));
  }
  double loss = 0.0;
  for (int t = 0; t < total_steps; ++t) {
    const std::size_t st = static_cast<std::size_t>(t);
    // Output at step t predicts the state at step t + 1.
    const MatrixXd diff =
        scale.pred * cache.outputs[st] - scale.target * truth[st + 1];
    loss += diff.squaredNorm();
    if (d_outputs != nullptr) {
      (*d_outputs)[st] = (2.0 * scale.pred / denom) * diff;
    }
  }
  return loss / denom;
}

void backward_rollout(ForecastModel& model, const std::vector<MatrixXd>& truth,
                      const RolloutCache& cache, int observe_len,
                      const std::vector<MatrixXd>& d_outputs) {
  const int total_steps = static_cast<int>(cache.outputs.size());
  const int observed_inputs = observe_len - 1;
  const Eigen::Index batch = truth.front().cols();
  MatrixXd dh_next = MatrixXd::Zero(model.hidden, batch);
  MatrixXd dc_next = MatrixXd::Zero(model.hidden, batch);
  MatrixXd d_feedback;  // gradient flowing into the previous raw output

  for (int t = total_steps - 1; t >= 0; --t) {
    const std::size_t st = static_cast<std::size_t>(t);
    MatrixXd d_out = d_outputs[st];
    if (d_feedback.size() != 0) {
      d_out += d_feedback;
      d_feedback.resize(0, 0);
    }
    MatrixXd dh = model.output_projection.backward(cache.hidden[st], d_out);
    dh += dh_next;
    MatrixXd d_projected, dh_prev, dc_prev;
    model.cell.backward(cache.cell[st], dh, dc_next, d_projected, dh_prev, dc_prev);
    dh_next = dh_prev;
    dc_next = dc_prev;
    if (t < observed_inputs) {
      d_projected = model.obs_norm.backward(cache.norm[st], d_projected);
    }
    const MatrixXd d_input = model.input_projection.backward(cache.inputs[st], d_projected);
    if (t > 0 && t >= observed_inputs) {
      d_feedback = d_input;  // input was the previous step's raw output
    }
  }
}

std::vector<MatrixXd> to_step_matrices(const std::vector<const StateSeq*>& seqs,
                                       Eigen::Index k) {
  const std::size_t steps = seqs.front()->size();
  std::vector<MatrixXd> out(steps, MatrixXd(k, static_cast<Eigen::Index>(seqs.size())));
  for (std::size_t b = 0; b < seqs.size(); ++b) {
    const StateSeq& seq = *seqs[b];
    if (seq.size() != steps) {
      throw Error(ErrorCode::LengthMismatch, "chunk state sequences differ in length");
    }
    for (std::size_t t = 0; t < steps; ++t) {
      if (seq[t].size() != k) {
        throw Error(ErrorCode::LengthMismatch, "state width does not match model k");
      }
      out[t].col(static_cast<Eigen::Index>(b)) = seq[t];
    }
  }
  return out;
}

// Unscaled prediction-window MSE from the raw outputs, using the emitted
// (clamped) states, matching what rollout() returns.
double prediction_window_mse(const std::vector<MatrixXd>& truth, const RolloutCache& cache,
                             int observe_len, const ScaleRule& scale) {
  const int total_steps = static_cast<int>(cache.outputs.size());
  const int first_pred = observe_len - 1;  // outputs for steps observe_len+1..end
  double sum = 0.0;
  double count = 0.0;
  for (int t = first_pred; t < total_steps; ++t) {
    const std::size_t st = static_cast<std::size_t>(t);
    const MatrixXd emitted = (scale.emit * cache.outputs[st]).cwiseMax(0.0);
    sum += (emitted - truth[st + 1]).squaredNorm();
    count += static_cast<double>(truth[st + 1].size());
  }
  return sum / count;
}

std::vector<VectorXd> snapshot_params(std::vector<nn::ParamRef>& refs) {
  std::vector<VectorXd> snap;
  snap.reserve(refs.size());
  for (const nn::ParamRef& p : refs) {
    snap.push_back(Eigen::Map<const VectorXd>(p.value, p.size));
  }
  return snap;
}

void restore_params(std::vector<nn::ParamRef>& refs, const std::vector<VectorXd>& snap) {
  for (std::size_t i = 0; i < refs.size(); ++i) {
    Eigen::Map<VectorXd>(refs[i].value, refs[i].size) = snap[i];
  }
}

nlohmann::ordered_json dump_matrix_row_major(const MatrixXd& m) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      arr.push_back(m(r, c));
    }
  }
  return arr;
}

nlohmann::ordered_json dump_vector(const VectorXd& v) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

void load_matrix_row_major(const nlohmann::json& arr, MatrixXd& m) {
  if (static_cast<Eigen::Index>(arr.size()) != m.size()) {
    throw Error(ErrorCode::CorruptFile, "parameter array size mismatch");
  }
  Eigen::Index idx = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = arr.at(static_cast<std::size_t>(idx++)).get<double>();
    }
  }
}

void load_vector(const nlohmann::json& arr, VectorXd& v) {
  if (static_cast<Eigen::Index>(arr.size()) != v.size()) {
    throw Error(ErrorCode::CorruptFile, "parameter array size mismatch");
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = arr.at(static_cast<std::size_t>(i)).get<double>();
  }
}

}  // namespace

long ForecastModel::param_count() const {
  const long kk = k;
  const long hh = hidden;
  return (kk * hh + hh) + 2 * hh + 4 * ((hh + hh) * hh + hh) + (hh * kk + kk);
}

std::string ForecastModel::param_formula() const {
  const long in_proj = static_cast<long>(k) * hidden + hidden;
  const long norm = 2L * hidden;
  const long lstm = 4L * ((static_cast<long>(hidden) + hidden) * hidden + hidden);
  const long out_proj = static_cast<long>(hidden) * k + k;
  return "dense(" + std::to_string(k) + "->" + std::to_string(hidden) + ")=" +
         std::to_string(in_proj) + " + layernorm(" + std::to_string(hidden) + ")=" +
         std::to_string(norm) + " + lstm(" + std::to_string(hidden) + "+" +
         std::to_string(hidden) + "->" + std::to_string(hidden) + ")=" +
         std::to_string(lstm) + " + dense(" + std::to_string(hidden) + "->" +
         std::to_string(k) + ")=" + std::to_string(out_proj) + " = " +
         std::to_string(in_proj + norm + lstm + out_proj);
}

std::vector<nn::ParamRef> ForecastModel::params() {
  std::vector<nn::ParamRef> refs;
  input_projection.collect_params("input_projection", refs);
  obs_norm.collect_params("obs_norm", refs);
  cell.collect_params("cell", refs);
  output_projection.collect_params("output_projection", refs);
  return refs;
}

void ForecastModel::zero_grad() {
  input_projection.zero_grad();
  obs_norm.zero_grad();
  cell.zero_grad();
  output_projection.zero_grad();
}

ForecastModel build_model(int k, std::uint64_t seed, int hidden) {
  if (k < 1) {
    throw Error(ErrorCode::InvalidK, "model k must be >= 1");
  }
  if (hidden < 1) {
    throw Error(ErrorCode::InvalidConfig, "hidden size must be >= 1");
  }
  ForecastModel model;
  model.k = k;
  model.hidden = hidden;
  model.input_projection = nn::DenseLayer(k, hidden);
  model.obs_norm = nn::LayerNorm(hidden);
  model.cell = nn::LstmCell(hidden, hidden);
  model.output_projection = nn::DenseLayer(hidden, k);
  std::mt19937_64 rng(seed);
  model.input_projection.init_uniform(rng);
  model.cell.init_uniform(rng);
  model.output_projection.init_uniform(rng);
  return model;
}

StateSeq rollout(const ForecastModel& model, const StateSeq& observed, int horizon,
                 double alpha) {
  if (observed.empty() || horizon < 0) {
    throw Error(ErrorCode::LengthMismatch, "rollout needs observations and horizon >= 0");
  }
  for (const StateVector& s : observed) {
    if (s.size() != model.k) {
      throw Error(ErrorCode::LengthMismatch,
                  "observed state width " + std::to_string(s.size()) +
                      " does not match model k=" + std::to_string(model.k));
    }
  }
  const int observe_len = static_cast<int>(observed.size());
  const ScaleRule scale = ScaleRule::make(alpha, model.scale_prediction_only);
  std::vector<MatrixXd> truth(static_cast<std::size_t>(observe_len + horizon),
                              MatrixXd::Zero(model.k, 1));
  for (int t = 0; t < observe_len; ++t) {
    truth[static_cast<std::size_t>(t)].col(0) = observed[static_cast<std::size_t>(t)];
  }
  RolloutCache cache;
  forward_rollout(model, truth, observe_len, horizon, scale, cache);
  StateSeq result;
  result.reserve(cache.outputs.size());
  for (const MatrixXd& out : cache.outputs) {
    result.push_back((scale.emit * out.col(0)).cwiseMax(0.0));
  }
  return result;
}

StateSeq persistence_forecast(const StateSeq& observed, int horizon) {
  if (observed.empty()) {
    throw Error(ErrorCode::LengthMismatch, "persistence needs at least one observation");
  }
  return StateSeq(static_cast<std::size_t>(horizon), observed.back());
}

std::vector<StateSeq> encode_chunk_states(const std::vector<Chunk>& chunks,
                                          const Codebook& codebook) {
  std::vector<StateSeq> seqs;
  seqs.reserve(chunks.size());
  for (const Chunk& chunk : chunks) {
    seqs.push_back(encode_frames(chunk.frames, codebook, codebook.min_radius));
  }
  return seqs;
}

TrainResult train_on_states(ForecastModel& model, const std::vector<StateSeq>& train_seqs,
                            const std::vector<StateSeq>& val_seqs, const TrainConfig& config) {
  if (train_seqs.empty()) {
    throw Error(ErrorCode::EmptyDataset, "no training chunks");
  }
  if (config.observe_len < 2 || config.predict_len < 0 || config.batch_chunks < 1 ||
      config.epochs < 0 || !(config.alpha > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "bad training configuration");
  }
  const std::size_t expected_len =
      static_cast<std::size_t>(config.observe_len) + static_cast<std::size_t>(config.predict_len);
  for (const auto* set : {&train_seqs, &val_seqs}) {
    for (const StateSeq& seq : *set) {
      if (seq.size() != expected_len) {
        throw Error(ErrorCode::LengthMismatch,
                    "chunk has " + std::to_string(seq.size()) + " states, expected " +
                        std::to_string(expected_len));
      }
    }
  }

  const ScaleRule scale = ScaleRule::make(config.alpha, config.scale_prediction_only);
  model.alpha = config.alpha;
  model.scale_prediction_only = config.scale_prediction_only;

  std::vector<nn::ParamRef> refs = model.params();
  nn::Adam optimizer(nn::AdamConfig{config.lr, 0.9, 0.999, 1e-8});
  std::mt19937_64 rng(config.seed);

  std::vector<std::size_t> order(train_seqs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  // Validation set packed once as a single batch.
  std::vector<MatrixXd> val_truth;
  if (!val_seqs.empty()) {
    std::vector<const StateSeq*> ptrs;
    ptrs.reserve(val_seqs.size());
    for (const StateSeq& s : val_seqs) ptrs.push_back(&s);
    val_truth = to_step_matrices(ptrs, model.k);
  }

  TrainResult result;
  std::vector<VectorXd> best_snapshot = snapshot_params(refs);
  double best_val = std::numeric_limits<double>::infinity();

  RolloutCache cache;
  std::vector<MatrixXd> d_outputs;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    double seen = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_chunks)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_chunks));
      std::vector<const StateSeq*> ptrs;
      ptrs.reserve(stop - start);
      for (std::size_t i = start; i < stop; ++i) ptrs.push_back(&train_seqs[order[i]]);
      const std::vector<MatrixXd> truth = to_step_matrices(ptrs, model.k);

      model.zero_grad();
      forward_rollout(model, truth, config.observe_len, config.predict_len, scale, cache);
      const double loss = rollout_loss(truth, cache, scale, &d_outputs);
      backward_rollout(model, truth, cache, config.observe_len, d_outputs);
      nn::clip_grad_norm(refs, config.grad_clip);
      optimizer.step(refs);

      epoch_loss += loss * static_cast<double>(ptrs.size());
      seen += static_cast<double>(ptrs.size());
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss / seen;
    if (!val_truth.empty()) {
      forward_rollout(model, val_truth, config.observe_len, config.predict_len, scale, cache);
      stats.val_loss = rollout_loss(val_truth, cache, scale, nullptr);
      stats.val_pred_mse = prediction_window_mse(val_truth, cache, config.observe_len, scale);
      if (stats.val_loss < best_val) {
        best_val = stats.val_loss;
        best_snapshot = snapshot_params(refs);
        result.best_epoch = epoch;
      }
    } else {
      best_snapshot = snapshot_params(refs);
      result.best_epoch = epoch;
    }
    result.history.push_back(stats);
  }

  restore_params(refs, best_snapshot);
  return result;
}

TrainResult train(ForecastModel& model, const std::vector<Chunk>& train_chunks,
                  const std::vector<Chunk>& val_chunks, const Codebook& codebook,
                  const TrainConfig& config) {
  return train_on_states(model, encode_chunk_states(train_chunks, codebook),
                         encode_chunk_states(val_chunks, codebook), config);
}

void save_model(const ForecastModel& model, const std::string& path) {
  nlohmann::ordered_json doc;
  doc["format"] = "swarmcast-forecaster";
  doc["version"] = kModelFileVersion;
  doc["k"] = model.k;
  doc["hidden"] = model.hidden;
  doc["alpha"] = model.alpha;
  doc["scale_prediction_only"] = model.scale_prediction_only;
  nlohmann::ordered_json layers;
  {
    nlohmann::ordered_json layer;
    layer["in"] = model.k;
    layer["out"] = model.hidden;
    layer["weight"] = dump_matrix_row_major(model.input_projection.weight);
    layer["bias"] = dump_vector(model.input_projection.bias);
    layers["input_projection"] = std::move(layer);
  }
  {
    nlohmann::ordered_json layer;
    layer["width"] = model.hidden;
    layer["epsilon"] = model.obs_norm.epsilon;
    layer["gain"] = dump_vector(model.obs_norm.gain);
    layer["bias"] = dump_vector(model.obs_norm.bias);
    layers["obs_norm"] = std::move(layer);
  }
  {
    nlohmann::ordered_json layer;
    layer["input"] = model.hidden;
    layer["hidden"] = model.hidden;
    layer["weight"] = dump_matrix_row_major(model.cell.weight);
    layer["bias"] = dump_vector(model.cell.bias);
    layers["cell"] = std::move(layer);
  }
  {
    nlohmann::ordered_json layer;
    layer["in"] = model.hidden;
    layer["out"] = model.k;
    layer["weight"] = dump_matrix_row_major(model.output_projection.weight);
    layer["bias"] = dump_vector(model.output_projection.bias);
    layers["output_projection"] = std::move(layer);
  }
  doc["layers"] = std::move(layers);
  write_text_file(path, doc.dump() + "\n");
}

ForecastModel load_model(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptFile, path + ": " + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "swarmcast-forecaster") {
      throw Error(ErrorCode::CorruptFile, path + ": not a forecaster file");
    }
    if (doc.at("version").get<int>() != kModelFileVersion) {
      throw Error(ErrorCode::VersionMismatch,
                  path + ": unsupported model version " + doc["version"].dump());
    }
    const int k = doc.at("k").get<int>();
    const int hidden = doc.at("hidden").get<int>();
    ForecastModel model = build_model(k, 0, hidden);
    model.alpha = doc.at("alpha").get<double>();
    model.scale_prediction_only = doc.at("scale_prediction_only").get<bool>();
    const auto& layers = doc.at("layers");
    load_matrix_row_major(layers.at("input_projection").at("weight"),
                          model.input_projection.weight);
    load_vector(layers.at("input_projection").at("bias"), model.input_projection.bias);
    model.obs_norm.epsilon = layers.at("obs_norm").at("epsilon").get<double>();
    load_vector(layers.at("obs_norm").at("gain"), model.obs_norm.gain);
    load_vector(layers.at("obs_norm").at("bias"), model.obs_norm.bias);
    load_matrix_row_major(layers.at("cell").at("weight"), model.cell.weight);
    load_vector(layers.at("cell").at("bias"), model.cell.bias);
    load_matrix_row_major(layers.at("output_projection").at("weight"),
                          model.output_projection.weight);
    load_vector(layers.at("output_projection").at("bias"), model.output_projection.bias);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptFile, path + ": " + e.what());
  }
}

double grad_check_rollout(int k, int hidden, int observe_len, int predict_len,
                          double alpha, std::uint64_t seed, double h) {
  ForecastModel model = build_model(k, seed, hidden);
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> radius(0.0, 0.12);
  const int steps = observe_len + predict_len;
  const Eigen::Index batch = 2;
  std::vector<MatrixXd> truth(static_cast<std::size_t>(steps));
  for (auto& m : truth) {
    m.resize(k, batch);
    for (Eigen::Index r = 0; r < k; ++r) {
      for (Eigen::Index c = 0; c < batch; ++c) {
        m(r, c) = radius(rng);
      }
    }
  }

  const ScaleRule scale = ScaleRule::make(alpha, false);
  std::vector<nn::ParamRef> refs = model.params();
  RolloutCache cache;
  std::vector<MatrixXd> d_outputs;
  auto loss_fn = [&]() {
    model.zero_grad();
    forward_rollout(model, truth, observe_len, predict_len, scale, cache);
    const double loss = rollout_loss(truth, cache, scale, &d_outputs);
    backward_rollout(model, truth, cache, observe_len, d_outputs);
    return loss;
  };
  return nn::grad_check(loss_fn, refs, h);
}

}  // namespace swarmcast
