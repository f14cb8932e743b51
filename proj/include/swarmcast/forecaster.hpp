#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swarmcast/nn.hpp"
#include "swarmcast/types.hpp"

namespace swarmcast {

// Input projection + layer normalization + one LSTM cell + output
// projection. The layer normalization runs only while the model consumes
// ground-truth observations; autoregressive steps bypass it.
struct ForecastModel {
  int k = 0;
  int hidden = 64;
  double alpha = 10.0;                 // radius scale the model was trained with
  bool scale_prediction_only = false;  // loss variant: scale only the prediction term
  nn::DenseLayer input_projection;     // k -> hidden
  nn::LayerNorm obs_norm;              // hidden
  nn::LstmCell cell;                   // hidden -> hidden
  nn::DenseLayer output_projection;    // hidden -> k

  long param_count() const;
  std::string param_formula() const;
  std::vector<nn::ParamRef> params();
  void zero_grad();
};

ForecastModel build_model(int k, std::uint64_t seed, int hidden = 64);

struct TrainConfig {
  double alpha = 10.0;
  double lr = 1e-3;
  int batch_chunks = 16;
  int epochs = 300;
  int observe_len = 25;
  int predict_len = 25;
  std::uint64_t seed = 0;
  bool scale_prediction_only = false;
  double grad_clip = 5.0;  // global-norm clip; <= 0 disables
};

using StateSeq = std::vector<StateVector>;

// Feeds the first observe_len-1 ground-truth states (normalized), then the
// model's own raw outputs for `horizon` further steps. Returns one
// prediction per consumed input — (observe_len - 1) + horizon states in
// original radius units, clamped to >= 0.
StateSeq rollout(const ForecastModel& model, const StateSeq& observed, int horizon,
                 double alpha);

// Repeats the last observed state; the baseline any trained model must beat.
StateSeq persistence_forecast(const StateSeq& observed, int horizon);

struct EpochStats {
  int epoch = 0;          // 1-based
  double train_loss = 0.0;  // scaled-space per-element MSE over all output steps
  double val_loss = 0.0;
  double val_pred_mse = 0.0;  // unscaled MSE over the prediction window only
};

struct TrainResult {
  std::vector<EpochStats> history;
  int best_epoch = 0;  // epoch whose parameters the model keeps
};

std::vector<StateSeq> encode_chunk_states(const std::vector<Chunk>& chunks,
                                          const Codebook& codebook);

// Adam + backpropagation through the full unroll, gradients flowing through
// the autoregressive feedback. Keeps the best-validation checkpoint.
TrainResult train_on_states(ForecastModel& model, const std::vector<StateSeq>& train_seqs,
                            const std::vector<StateSeq>& val_seqs, const TrainConfig& config);

TrainResult train(ForecastModel& model, const std::vector<Chunk>& train_chunks,
                  const std::vector<Chunk>& val_chunks, const Codebook& codebook,
                  const TrainConfig& config);

// Versioned JSON with explicit shapes and row-major parameter arrays;
// load(save(m)) reproduces rollouts bit-identically.
void save_model(const ForecastModel& model, const std::string& path);
ForecastModel load_model(const std::string& path);

// Whole-unroll BPTT vs central finite differences on every parameter.
double grad_check_rollout(int k, int hidden, int observe_len, int predict_len,
                          double alpha, std::uint64_t seed, double h = 1e-5);

}  // namespace swarmcast
