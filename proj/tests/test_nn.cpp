#include <random>

#include "doctest.h"
#include "swarmcast/nn.hpp"

using namespace swarmcast;
using nn::MatrixXd;
using nn::VectorXd;

TEST_CASE("dense identity passes input through") {
  nn::DenseLayer layer(3, 3);
  layer.weight = MatrixXd::Identity(3, 3);
  layer.bias.setZero();
  VectorXd x(3);
  x << 0.3, -1.2, 4.0;
  const MatrixXd y = layer.forward(x);
  CHECK((y - x).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(layer.forward(VectorXd::Zero(4)), Error);
}

TEST_CASE("layernorm maps constant vectors to the affine offset") {
  nn::LayerNorm norm(5);
  nn::LayerNorm::Cache cache;
  const MatrixXd y = norm.forward(MatrixXd::Constant(5, 1, 3.7), cache);
  // Zero variance: the normalized core collapses to zero and only the
  // affine part remains.
  CHECK(y.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("dense gradients match finite differences") {
  CHECK(nn::grad_check_dense(4, 8, 3, 12345) < 1e-4);
  CHECK(nn::grad_check_dense(8, 4, 1, 999) < 1e-4);
}

TEST_CASE("layernorm gradients match finite differences") {
  CHECK(nn::grad_check_layernorm(64, 2, 777) < 1e-4);
  CHECK(nn::grad_check_layernorm(7, 5, 101) < 1e-4);
}

TEST_CASE("lstm cell gradients match finite differences through time") {
  CHECK(nn::grad_check_cell(5, 6, 3, 2, 4242) < 1e-4);
  CHECK(nn::grad_check_cell(3, 4, 1, 1, 11) < 1e-4);
}

TEST_CASE("adam leaves parameters alone under zero gradient") {
  VectorXd value(4);
  value << 1.0, -2.0, 0.5, 3.0;
  VectorXd grad = VectorXd::Zero(4);
  std::vector<nn::ParamRef> refs = {{"p", value.data(), grad.data(), 4}};
  nn::Adam adam;
  const VectorXd before = value;
  adam.step(refs);
  CHECK((value - before).cwiseAbs().maxCoeff() == 0.0);
  CHECK(adam.step_count() == 1);
}

TEST_CASE("first adam step has magnitude close to the learning rate") {
  VectorXd value = VectorXd::Zero(3);
  VectorXd grad(3);
  grad << 0.7, -0.1, 2.5;  // constant sign pattern
  std::vector<nn::ParamRef> refs = {{"p", value.data(), grad.data(), 3}};
  nn::AdamConfig cfg;
  cfg.lr = 1e-3;
  nn::Adam adam(cfg);
  adam.step(refs);
  // Bias-corrected first step is lr * g / (|g| + eps) = lr * sign(g).
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(value[i]) == doctest::Approx(cfg.lr).epsilon(1e-6));
    CHECK(std::signbit(value[i]) != std::signbit(grad[i]));
  }
}

TEST_CASE("adam trajectories are reproducible") {
  auto run = [] {
    std::mt19937_64 rng(5);
    nn::DenseLayer layer(4, 4);
    layer.init_uniform(rng);
    MatrixXd x(4, 2);
    x << 0.1, 0.9, 0.4, 0.2, 0.7, 0.3, 0.5, 0.8;
    const MatrixXd target = MatrixXd::Constant(4, 2, 0.25);
    std::vector<nn::ParamRef> refs;
    layer.collect_params("d", refs);
    nn::Adam adam;
    for (int step = 0; step < 25; ++step) {
      layer.zero_grad();
      const MatrixXd y = layer.forward(x);
      layer.backward(x, y - target);
      adam.step(refs);
    }
    return layer.weight;
  };
  const MatrixXd a = run();
  const MatrixXd b = run();
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("grad clipping rescales to the requested norm") {
  VectorXd value = VectorXd::Zero(2);
  VectorXd grad(2);
  grad << 3.0, 4.0;  // norm 5
  std::vector<nn::ParamRef> refs = {{"p", value.data(), grad.data(), 2}};
  const double norm = nn::clip_grad_norm(refs, 1.0);
  CHECK(norm == doctest::Approx(5.0));
  CHECK(grad.norm() == doctest::Approx(1.0).epsilon(1e-12));

  // Disabled clipping leaves gradients alone.
  grad << 3.0, 4.0;
  nn::clip_grad_norm(refs, 0.0);
  CHECK(grad.norm() == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("forward passes are pure") {
  std::mt19937_64 rng(88);
  nn::LstmCell cell(4, 6);
  cell.init_uniform(rng);
  const MatrixXd x = MatrixXd::Random(4, 3);
  const MatrixXd h0 = MatrixXd::Zero(6, 3);
  const MatrixXd c0 = MatrixXd::Zero(6, 3);
  MatrixXd h1, c1, h2, c2;
  nn::LstmCell::StepCache cache1, cache2;
  cell.forward(x, h0, c0, h1, c1, cache1);
  cell.forward(x, h0, c0, h2, c2, cache2);
  CHECK((h1 - h2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((c1 - c2).cwiseAbs().maxCoeff() == 0.0);
}
