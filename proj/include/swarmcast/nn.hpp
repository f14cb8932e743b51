#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swarmcast/types.hpp"

namespace swarmcast::nn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// View over one parameter buffer and its gradient, for the optimizer,
// serialization, and finite-difference loops.
struct ParamRef {
  std::string name;
  double* value = nullptr;
  double* grad = nullptr;
  Eigen::Index size = 0;
};

// y = W x + b. Inputs are column vectors; a matrix input is a batch.
struct DenseLayer {
  MatrixXd weight;  // out x in
  VectorXd bias;
  MatrixXd grad_weight;
  VectorXd grad_bias;

  DenseLayer() = default;
  DenseLayer(Eigen::Index in, Eigen::Index out);

  Eigen::Index in() const { return weight.cols(); }
  Eigen::Index out() const { return weight.rows(); }

  // U[-1/sqrt(in), +1/sqrt(in)] on weights and bias.
  void init_uniform(std::mt19937_64& rng);

  MatrixXd forward(const MatrixXd& x) const;
  // Returns dx and accumulates parameter gradients.
  MatrixXd backward(const MatrixXd& x, const MatrixXd& dy);

  void zero_grad();
  void collect_params(const std::string& prefix, std::vector<ParamRef>& out);
};

// Per-column normalization to zero mean / unit variance with learned affine.
struct LayerNorm {
  VectorXd gain;
  VectorXd bias;
  double epsilon = 1e-5;
  VectorXd grad_gain;
  VectorXd grad_bias;

  struct Cache {
    MatrixXd xhat;
    VectorXd inv_sigma;  // per column
  };

  LayerNorm() = default;
  explicit LayerNorm(Eigen::Index width, double eps = 1e-5);

  Eigen::Index width() const { return gain.size(); }

  MatrixXd forward(const MatrixXd& x, Cache& cache) const;
  MatrixXd backward(const Cache& cache, const MatrixXd& dy);

  void zero_grad();
  void collect_params(const std::string& prefix, std::vector<ParamRef>& out);
};

// Single LSTM step over concatenated [x; h_prev]. Gate rows are stacked in
// the order input, forget, candidate, output.
struct LstmCell {
  MatrixXd weight;  // 4H x (in + H)
  VectorXd bias;    // 4H
  MatrixXd grad_weight;
  VectorXd grad_bias;

  struct StepCache {
    MatrixXd x, h_prev, c_prev;
    MatrixXd gate_i, gate_f, gate_g, gate_o;
    MatrixXd c, tanh_c;
  };

  LstmCell() = default;
  LstmCell(Eigen::Index input_size, Eigen::Index hidden_size);

  Eigen::Index input_size() const { return weight.cols() - hidden_size(); }
  Eigen::Index hidden_size() const { return weight.rows() / 4; }

  // U[-1/sqrt(in+H), +1/sqrt(in+H)], then the forget-gate bias block is
  // set to 1.
  void init_uniform(std::mt19937_64& rng);

  void forward(const MatrixXd& x, const MatrixXd& h_prev, const MatrixXd& c_prev,
               MatrixXd& h, MatrixXd& c, StepCache& cache) const;
  // dh and dc carry gradients arriving at this step's outputs; emits
  // gradients for the step inputs and accumulates parameter gradients.
  void backward(const StepCache& cache, const MatrixXd& dh, const MatrixXd& dc,
                MatrixXd& dx, MatrixXd& dh_prev, MatrixXd& dc_prev);

  void zero_grad();
  void collect_params(const std::string& prefix, std::vector<ParamRef>& out);
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction over a flat view of all parameters.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  void step(std::vector<ParamRef>& params);
  long step_count() const { return step_count_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  long step_count_ = 0;
  VectorXd moment1_;
  VectorXd moment2_;
};

// Scales all gradients so their global L2 norm is at most max_norm.
// Returns the pre-clip norm. max_norm <= 0 disables clipping.
double clip_grad_norm(std::vector<ParamRef>& params, double max_norm);

// Central finite differences on every coordinate exposed by `params`.
// `loss_with_grads` must zero gradients, run forward+backward at the
// current parameter values and return the loss. Relative error uses
// |fd - analytic| / max(|fd|, |analytic|, floor); the floor keeps
// noise-dominated near-zero coordinates from registering as failures.
double grad_check(const std::function<double()>& loss_with_grads,
                  std::vector<ParamRef>& params, double h = 1e-5,
                  double floor = 1e-4);

// Self-contained random-instance checks; each returns the max relative
// error over all parameters and inputs.
double grad_check_dense(Eigen::Index in, Eigen::Index out, Eigen::Index batch,
                        std::uint64_t seed, double h = 1e-5);
double grad_check_layernorm(Eigen::Index width, Eigen::Index batch,
                            std::uint64_t seed, double h = 1e-5);
double grad_check_cell(Eigen::Index in, Eigen::Index hidden, int steps,
                       Eigen::Index batch, std::uint64_t seed, double h = 1e-5);

}  // namespace swarmcast::nn
