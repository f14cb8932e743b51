#include "swarmcast/nn.hpp"

#include <cmath>

namespace swarmcast::nn {

namespace {

void fill_uniform(MatrixXd& m, std::mt19937_64& rng, double bound) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = dist(rng);
    }
  }
}

void fill_uniform(VectorXd& v, std::mt19937_64& rng, double bound) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = dist(rng);
  }
}

MatrixXd sigmoid(const MatrixXd& z) {
  return 1.0 / (1.0 + (-z.array()).exp());
}

}  // namespace

DenseLayer::DenseLayer(Eigen::Index in, Eigen::Index out)
    : weight(MatrixXd::Zero(out, in)),
      bias(VectorXd::Zero(out)),
      grad_weight(MatrixXd::Zero(out, in)),
      grad_bias(VectorXd::Zero(out)) {}

void DenseLayer::init_uniform(std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in()));
  fill_uniform(weight, rng, bound);
  fill_uniform(bias, rng, bound);
}

MatrixXd DenseLayer::forward(const MatrixXd& x) const {
  if (x.rows() != in()) {
    throw Error(ErrorCode::ShapeMismatch,
                "dense expected " + std::to_string(in()) + " input rows, got " +
                    std::to_string(x.rows()));
  }
  return (weight * x).colwise() + bias;
}

MatrixXd DenseLayer::backward(const MatrixXd& x, const MatrixXd& dy) {
  if (dy.rows() != out() || dy.cols() != x.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "dense backward shape mismatch");
  }
  grad_weight.noalias() += dy * x.transpose();
  grad_bias.noalias() += dy.rowwise().sum();
  return weight.transpose() * dy;
}

void DenseLayer::zero_grad() {
  grad_weight.setZero();
  grad_bias.setZero();
}

void DenseLayer::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({prefix + ".weight", weight.data(), grad_weight.data(), weight.size()});
  out.push_back({prefix + ".bias", bias.data(), grad_bias.data(), bias.size()});
}

LayerNorm::LayerNorm(Eigen::Index width, double eps)
    : gain(VectorXd::Ones(width)),
      bias(VectorXd::Zero(width)),
      epsilon(eps),
      grad_gain(VectorXd::Zero(width)),
      grad_bias(VectorXd::Zero(width)) {}

MatrixXd LayerNorm::forward(const MatrixXd& x, Cache& cache) const {
  if (x.rows() != width()) {
    throw Error(ErrorCode::ShapeMismatch, "layernorm width mismatch");
  }
  const Eigen::Index n = x.rows();
  cache.xhat.resize(x.rows(), x.cols());
  cache.inv_sigma.resize(x.cols());
  MatrixXd y(x.rows(), x.cols());
  for (Eigen::Index col = 0; col < x.cols(); ++col) {
    const double mu = x.col(col).mean();
    const double var = (x.col(col).array() - mu).square().sum() / static_cast<double>(n);
    const double inv_sigma = 1.0 / std::sqrt(var + epsilon);
    cache.inv_sigma[col] = inv_sigma;
    cache.xhat.col(col) = (x.col(col).array() - mu) * inv_sigma;
    y.col(col) = gain.array() * cache.xhat.col(col).array() + bias.array();
  }
  return y;
}

MatrixXd LayerNorm::backward(const Cache& cache, const MatrixXd& dy) {
  if (dy.rows() != width() || dy.cols() != cache.xhat.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "layernorm backward shape mismatch");
  }
  const double n = static_cast<double>(width());
  MatrixXd dx(dy.rows(), dy.cols());
  for (Eigen::Index col = 0; col < dy.cols(); ++col) {
    const auto xhat = cache.xhat.col(col).array();
    const auto dxhat = dy.col(col).array() * gain.array();
    const double mean_dxhat = dxhat.sum() / n;
    const double mean_dxhat_xhat = (dxhat * xhat).sum() / n;
    dx.col(col) = (dxhat - mean_dxhat - xhat * mean_dxhat_xhat) * cache.inv_sigma[col];
    grad_gain.array() += dy.col(col).array() * xhat;
    grad_bias += dy.col(col);
  }
  return dx;
}

void LayerNorm::zero_grad() {
  grad_gain.setZero();
  grad_bias.setZero();
}

void LayerNorm::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({prefix + ".gain", gain.data(), grad_gain.data(), gain.size()});
  out.push_back({prefix + ".bias", bias.data(), grad_bias.data(), bias.size()});
}

LstmCell::LstmCell(Eigen::Index input_size, Eigen::Index hidden_size)
    : weight(MatrixXd::Zero(4 * hidden_size, input_size + hidden_size)),
      bias(VectorXd::Zero(4 * hidden_size)),
      grad_weight(MatrixXd::Zero(4 * hidden_size, input_size + hidden_size)),
      grad_bias(VectorXd::Zero(4 * hidden_size)) {}

void LstmCell::init_uniform(std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(weight.cols()));
  fill_uniform(weight, rng, bound);
  fill_uniform(bias, rng, bound);
  bias.segment(hidden_size(), hidden_size()).setConstant(1.0);  // forget gate
}

void LstmCell::forward(const MatrixXd& x, const MatrixXd& h_prev, const MatrixXd& c_prev,
                       MatrixXd& h, MatrixXd& c, StepCache& cache) const {
  const Eigen::Index hsz = hidden_size();
  if (x.rows() != input_size() || h_prev.rows() != hsz || c_prev.rows() != hsz ||
      x.cols() != h_prev.cols() || x.cols() != c_prev.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "lstm forward shape mismatch");
  }
  MatrixXd xh(x.rows() + hsz, x.cols());
  xh << x, h_prev;
  const MatrixXd z = (weight * xh).colwise() + bias;
  cache.x = x;
  cache.h_prev = h_prev;
  cache.c_prev = c_prev;
  cache.gate_i = sigmoid(z.topRows(hsz));
  cache.gate_f = sigmoid(z.middleRows(hsz, hsz));
  cache.gate_g = z.middleRows(2 * hsz, hsz).array().tanh();
  cache.gate_o = sigmoid(z.bottomRows(hsz));
  cache.c = cache.gate_f.array() * c_prev.array() + cache.gate_i.array() * cache.gate_g.array();
  cache.tanh_c = cache.c.array().tanh();
  c = cache.c;
  h = cache.gate_o.array() * cache.tanh_c.array();
}

void LstmCell::backward(const StepCache& cache, const MatrixXd& dh, const MatrixXd& dc,
                        MatrixXd& dx, MatrixXd& dh_prev, MatrixXd& dc_prev) {
  const Eigen::Index hsz = hidden_size();
  const auto& i = cache.gate_i.array();
  const auto& f = cache.gate_f.array();
  const auto& g = cache.gate_g.array();
  const auto& o = cache.gate_o.array();
  const auto& tc = cache.tanh_c.array();

  const MatrixXd d_o = dh.array() * tc;
  const MatrixXd d_c_total = dc.array() + dh.array() * o * (1.0 - tc.square());
  const MatrixXd d_i = d_c_total.array() * g;
  const MatrixXd d_f = d_c_total.array() * cache.c_prev.array();
  const MatrixXd d_g = d_c_total.array() * i;
  dc_prev = d_c_total.array() * f;

  MatrixXd dz(4 * hsz, dh.cols());
  dz.topRows(hsz) = d_i.array() * i * (1.0 - i);
  dz.middleRows(hsz, hsz) = d_f.array() * f * (1.0 - f);
  dz.middleRows(2 * hsz, hsz) = d_g.array() * (1.0 - g.square());
  dz.bottomRows(hsz) = d_o.array() * o * (1.0 - o);

  MatrixXd xh(cache.x.rows() + hsz, dh.cols());
  xh << cache.x, cache.h_prev;
  grad_weight.noalias() += dz * xh.transpose();
  grad_bias.noalias() += dz.rowwise().sum();

  const MatrixXd dxh = weight.transpose() * dz;
  dx = dxh.topRows(cache.x.rows());
  dh_prev = dxh.bottomRows(hsz);
}

void LstmCell::zero_grad() {
  grad_weight.setZero();
  grad_bias.setZero();
}

void LstmCell::collect_params(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({prefix + ".weight", weight.data(), grad_weight.data(), weight.size()});
  out.push_back({prefix + ".bias", bias.data(), grad_bias.data(), bias.size()});
}

void Adam::step(std::vector<ParamRef>& params) {
  Eigen::Index total = 0;
  for (const ParamRef& p : params) total += p.size;
  if (moment1_.size() == 0) {
    moment1_ = VectorXd::Zero(total);
    moment2_ = VectorXd::Zero(total);
  } else if (moment1_.size() != total) {
    throw Error(ErrorCode::ShapeMismatch, "optimizer state does not match parameter count");
  }

  ++step_count_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_count_));

  Eigen::Index offset = 0;
  for (ParamRef& p : params) {
    Eigen::Map<VectorXd> value(p.value, p.size);
    Eigen::Map<const VectorXd> grad(p.grad, p.size);
    auto m = moment1_.segment(offset, p.size);
    auto v = moment2_.segment(offset, p.size);
    m = config_.beta1 * m + (1.0 - config_.beta1) * grad;
    v = config_.beta2 * v.array() + (1.0 - config_.beta2) * grad.array().square();
    const auto m_hat = m.array() / bc1;
    const auto v_hat = v.array() / bc2;
    value.array() -= config_.lr * m_hat / (v_hat.sqrt() + config_.epsilon);
    offset += p.size;
  }
}

double clip_grad_norm(std::vector<ParamRef>& params, double max_norm) {
  double sq = 0.0;
  for (const ParamRef& p : params) {
    sq += Eigen::Map<const VectorXd>(p.grad, p.size).squaredNorm();
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (ParamRef& p : params) {
      Eigen::Map<VectorXd>(p.grad, p.size) *= scale;
    }
  }
  return norm;
}

double grad_check(const std::function<double()>& loss_with_grads,
                  std::vector<ParamRef>& params, double h, double floor) {
  loss_with_grads();
  std::vector<VectorXd> analytic;
  analytic.reserve(params.size());
  for (const ParamRef& p : params) {
    analytic.push_back(Eigen::Map<const VectorXd>(p.grad, p.size));
  }

  double worst = 0.0;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    ParamRef& p = params[pi];
    for (Eigen::Index i = 0; i < p.size; ++i) {
      const double saved = p.value[i];
      p.value[i] = saved + h;
      const double loss_plus = loss_with_grads();
      p.value[i] = saved - h;
      const double loss_minus = loss_with_grads();
      p.value[i] = saved;
      const double fd = (loss_plus - loss_minus) / (2.0 * h);
      const double a = analytic[pi][i];
      const double err = std::abs(fd - a) / std::max({std::abs(fd), std::abs(a), floor});
      worst = std::max(worst, err);
    }
  }
  // Restore gradients for the untouched parameter values.
  loss_with_grads();
  return worst;
}

namespace {

// Quadratic loss against a fixed random target; gradient dy = out - target.
MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = dist(rng);
    }
  }
  return m;
}

}  // namespace

double grad_check_dense(Eigen::Index in, Eigen::Index out, Eigen::Index batch,
                        std::uint64_t seed, double h) {
  std::mt19937_64 rng(seed);
  DenseLayer layer(in, out);
  layer.init_uniform(rng);
  MatrixXd x = random_matrix(in, batch, rng);
  MatrixXd x_grad = MatrixXd::Zero(in, batch);
  const MatrixXd target = random_matrix(out, batch, rng);

  std::vector<ParamRef> refs;
  layer.collect_params("dense", refs);
  refs.push_back({"input", x.data(), x_grad.data(), x.size()});

  auto loss_fn = [&]() {
    layer.zero_grad();
    x_grad.setZero();
    const MatrixXd y = layer.forward(x);
    const MatrixXd dy = y - target;
    // += keeps x_grad's buffer alive; plain assignment from a temporary
    // would move-swap it out from under the ParamRef.
    x_grad += layer.backward(x, dy);
    return 0.5 * dy.squaredNorm();
  };
  return grad_check(loss_fn, refs, h);
}

double grad_check_layernorm(Eigen::Index width, Eigen::Index batch,
                            std::uint64_t seed, double h) {
  std::mt19937_64 rng(seed);
  LayerNorm norm(width);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  for (Eigen::Index i = 0; i < width; ++i) norm.gain[i] = dist(rng);
  for (Eigen::Index i = 0; i < width; ++i) norm.bias[i] = dist(rng) - 1.0;
  MatrixXd x = random_matrix(width, batch, rng);
  MatrixXd x_grad = MatrixXd::Zero(width, batch);
  const MatrixXd target = random_matrix(width, batch, rng);

  std::vector<ParamRef> refs;
  norm.collect_params("layernorm", refs);
  refs.push_back({"input", x.data(), x_grad.data(), x.size()});

  LayerNorm::Cache cache;
  auto loss_fn = [&]() {
    norm.zero_grad();
    x_grad.setZero();
    const MatrixXd y = norm.forward(x, cache);
    const MatrixXd dy = y - target;
    x_grad += norm.backward(cache, dy);
    return 0.5 * dy.squaredNorm();
  };
  return grad_check(loss_fn, refs, h);
}

double grad_check_cell(Eigen::Index in, Eigen::Index hidden, int steps,
                       Eigen::Index batch, std::uint64_t seed, double h) {
  std::mt19937_64 rng(seed);
  LstmCell cell(in, hidden);
  cell.init_uniform(rng);
  std::vector<MatrixXd> inputs;
  std::vector<MatrixXd> input_grads;
  std::vector<MatrixXd> targets;
  for (int t = 0; t < steps; ++t) {
    inputs.push_back(random_matrix(in, batch, rng));
    input_grads.push_back(MatrixXd::Zero(in, batch));
    targets.push_back(random_matrix(hidden, batch, rng));
  }

  std::vector<ParamRef> refs;
  cell.collect_params("cell", refs);
  for (int t = 0; t < steps; ++t) {
    refs.push_back({"input" + std::to_string(t), inputs[static_cast<std::size_t>(t)].data(),
                    input_grads[static_cast<std::size_t>(t)].data(),
                    inputs[static_cast<std::size_t>(t)].size()});
  }

  auto loss_fn = [&]() {
    cell.zero_grad();
    for (MatrixXd& g : input_grads) g.setZero();
    std::vector<LstmCell::StepCache> caches(static_cast<std::size_t>(steps));
    MatrixXd hcur = MatrixXd::Zero(hidden, batch);
    MatrixXd ccur = MatrixXd::Zero(hidden, batch);
    std::vector<MatrixXd> hs;
    double loss = 0.0;
    for (int t = 0; t < steps; ++t) {
      MatrixXd hn, cn;
      cell.forward(inputs[static_cast<std::size_t>(t)], hcur, ccur, hn, cn,
                   caches[static_cast<std::size_t>(t)]);
      hcur = hn;
      ccur = cn;
      hs.push_back(hn);
      loss += 0.5 * (hn - targets[static_cast<std::size_t>(t)]).squaredNorm();
    }
    MatrixXd dh_next = MatrixXd::Zero(hidden, batch);
    MatrixXd dc_next = MatrixXd::Zero(hidden, batch);
    for (int t = steps - 1; t >= 0; --t) {
      const MatrixXd dh =
          dh_next + (hs[static_cast<std::size_t>(t)] - targets[static_cast<std::size_t>(t)]);
      MatrixXd dx, dh_prev, dc_prev;
      cell.backward(caches[static_cast<std::size_t>(t)], dh, dc_next, dx, dh_prev, dc_prev);
      input_grads[static_cast<std::size_t>(t)] += dx;
      dh_next = dh_prev;
      dc_next = dc_prev;
    }
    return loss;
  };
  return grad_check(loss_fn, refs, h);
}

}  // namespace swarmcast::nn
