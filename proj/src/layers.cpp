#include "vtag/layers.hpp"

#include <cmath>
#include <string>

#include "vtag/errors.hpp"
#include "vtag/rng.hpp"

namespace vtag {

EmbeddingTable::EmbeddingTable(std::size_t vocab, std::size_t width)
    : vocab_(vocab),
      width_(width),
      table_({vocab + 2, width}),
      grad_({vocab + 2, width}) {}

void EmbeddingTable::init(Rng& rng, double stddev) {
  for (std::size_t i = 0; i < table_.size(); ++i)
    table_[i] = stddev * rng.normal();
}

Tensor EmbeddingTable::rows(const std::vector<int>& ids) const {
  Tensor out({ids.size(), width_});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    int id = ids[i];
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_ext())
      throw VocabularyError("embedding id " + std::to_string(id) +
                            " outside [0, " + std::to_string(vocab_ext()) + ")");
    for (std::size_t c = 0; c < width_; ++c)
      out.at(i, c) = table_.at(static_cast<std::size_t>(id), c);
  }
  return out;
}

void EmbeddingTable::accumulate_grad(const std::vector<int>& ids, const Tensor& d) {
  if (d.rows() != ids.size() || d.cols() != width_)
    throw DimensionError("embedding grad shape disagrees with id count");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    int id = ids[i];
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_ext())
      throw VocabularyError("embedding id out of range in backward");
    for (std::size_t c = 0; c < width_; ++c)
      grad_.at(static_cast<std::size_t>(id), c) += d.at(i, c);
  }
}

void EmbeddingTable::collect_params(std::vector<ParamRef>& out,
                                    const std::string& prefix) {
  out.push_back({join_name(prefix, "table"), &table_, &grad_});
}

WordProjection::WordProjection(std::size_t hidden_dim, std::size_t out_dim)
    : hidden_dim_(hidden_dim),
      out_dim_(out_dim),
      w_({hidden_dim, out_dim}),
      b_({out_dim}),
      dw_({hidden_dim, out_dim}),
      db_({out_dim}) {}

void WordProjection::init(Rng& rng) {
  const double stddev = 1.0 / std::sqrt(static_cast<double>(hidden_dim_));
  for (std::size_t i = 0; i < w_.size(); ++i) w_[i] = stddev * rng.normal();
  b_.fill(0.0);
}

Tensor WordProjection::forward(const Tensor& h) const {
  if (h.cols() != hidden_dim_)
    throw DimensionError("word projection: hidden width disagrees");
  return add_row_broadcast(matmul(h, w_), b_);
}

Tensor WordProjection::backward(const Tensor& h, const Tensor& dlogits) {
  axpy(1.0, matmul_tn(h, dlogits), dw_);
  axpy(1.0, col_sum(dlogits), db_);
  return matmul_nt(dlogits, w_);
}

void WordProjection::zero_grad() {
  dw_.fill(0.0);
  db_.fill(0.0);
}

void WordProjection::collect_params(std::vector<ParamRef>& out,
                                    const std::string& prefix) {
  out.push_back({join_name(prefix, "w"), &w_, &dw_});
  out.push_back({join_name(prefix, "b"), &b_, &db_});
}

BatchNorm::BatchNorm(std::size_t dim, double gamma_init, bool learn_beta,
                     double decay, double eps)
    : dim_(dim),
      decay_(decay),
      eps_(eps),
      learn_beta_(learn_beta),
      gamma_(Tensor::full({dim}, gamma_init)),
      beta_({dim}),
      dgamma_({dim}),
      dbeta_({dim}),
      pop_mean_({dim}),
      pop_var_(Tensor::full({dim}, 1.0)) {}

Tensor BatchNorm::forward(const Tensor& x, BnMode mode, BnCache* cache,
                          bool update_stats) {
  if (x.cols() != dim_) throw DimensionError("batch_norm: width disagrees");
  const std::size_t b = x.rows();
  Tensor mean({dim_}), var({dim_});
  bool batch_stats = (mode == BnMode::kTrain);
  if (batch_stats) {
    if (b < 2)
      throw BatchSizeError("batch_norm: train mode requires batch >= 2");
    for (std::size_t r = 0; r < b; ++r)
      for (std::size_t c = 0; c < dim_; ++c) mean[c] += x.at(r, c);
    for (std::size_t c = 0; c < dim_; ++c) mean[c] /= static_cast<double>(b);
    for (std::size_t r = 0; r < b; ++r)
      for (std::size_t c = 0; c < dim_; ++c) {
        const double d = x.at(r, c) - mean[c];
        var[c] += d * d;
      }
    for (std::size_t c = 0; c < dim_; ++c) var[c] /= static_cast<double>(b);
    if (update_stats) {
      for (std::size_t c = 0; c < dim_; ++c) {
        pop_mean_[c] = decay_ * pop_mean_[c] + (1.0 - decay_) * mean[c];
        pop_var_[c] = decay_ * pop_var_[c] + (1.0 - decay_) * var[c];
      }
    }
  } else {
    mean = pop_mean_;
    var = pop_var_;
  }

  Tensor inv_std({dim_});
  for (std::size_t c = 0; c < dim_; ++c)
    inv_std[c] = 1.0 / std::sqrt(var[c] + eps_);

  Tensor xhat({b, dim_});
  Tensor y({b, dim_});
  for (std::size_t r = 0; r < b; ++r)
    for (std::size_t c = 0; c < dim_; ++c) {
      const double xh = (x.at(r, c) - mean[c]) * inv_std[c];
      xhat.at(r, c) = xh;
      y.at(r, c) = gamma_[c] * xh + beta_[c];
    }

  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv_std);
    cache->batch = b;
    cache->batch_stats = batch_stats;
  }
  return y;
}

Tensor BatchNorm::backward(const BnCache& cache, const Tensor& dy) {
  const std::size_t b = cache.batch;
  if (dy.rows() != b || dy.cols() != dim_)
    throw DimensionError("batch_norm backward: shape disagrees with cache");

  for (std::size_t r = 0; r < b; ++r)
    for (std::size_t c = 0; c < dim_; ++c) {
      dgamma_[c] += dy.at(r, c) * cache.xhat.at(r, c);
      if (learn_beta_) dbeta_[c] += dy.at(r, c);
    }

  Tensor dx({b, dim_});
  if (!cache.batch_stats) {
    for (std::size_t r = 0; r < b; ++r)
      for (std::size_t c = 0; c < dim_; ++c)
        dx.at(r, c) = dy.at(r, c) * gamma_[c] * cache.inv_std[c];
    return dx;
  }

  // With batch statistics in the graph:
  // dx = gamma * inv_std * (dy - mean(dy) - xhat * mean(dy * xhat)).
  Tensor mean_dy({dim_}), mean_dyx({dim_});
  for (std::size_t r = 0; r < b; ++r)
    for (std::size_t c = 0; c < dim_; ++c) {
      mean_dy[c] += dy.at(r, c);
      mean_dyx[c] += dy.at(r, c) * cache.xhat.at(r, c);
    }
  for (std::size_t c = 0; c < dim_; ++c) {
    mean_dy[c] /= static_cast<double>(b);
    mean_dyx[c] /= static_cast<double>(b);
  }
  for (std::size_t r = 0; r < b; ++r)
    for (std::size_t c = 0; c < dim_; ++c)
      dx.at(r, c) = gamma_[c] * cache.inv_std[c] *
                    (dy.at(r, c) - mean_dy[c] -
                     cache.xhat.at(r, c) * mean_dyx[c]);
  return dx;
}

void BatchNorm::zero_grad() {
  dgamma_.fill(0.0);
  dbeta_.fill(0.0);
}

void BatchNorm::collect_params(std::vector<ParamRef>& out,
                               const std::string& prefix) {
  out.push_back({join_name(prefix, "gamma"), &gamma_, &dgamma_});
  if (learn_beta_) out.push_back({join_name(prefix, "beta"), &beta_, &dbeta_});
}

void BatchNorm::collect_state(std::vector<StateRef>& out,
                              const std::string& prefix) {
  out.push_back({join_name(prefix, "pop_mean"), &pop_mean_});
  out.push_back({join_name(prefix, "pop_var"), &pop_var_});
}

std::vector<double> softmax_ce_rows(const Tensor& logits,
                                    const std::vector<int>& targets,
                                    Tensor* dlogits) {
  const std::size_t b = logits.rows(), v = logits.cols();
  if (targets.size() != b)
    throw DimensionError("softmax ce: target count disagrees with batch");
  Tensor probs = softmax(logits);
  std::vector<double> losses(b);
  if (dlogits) *dlogits = probs;
  for (std::size_t r = 0; r < b; ++r) {
    int t = targets[r];
    if (t < 0 || static_cast<std::size_t>(t) >= v)
      throw VocabularyError("softmax ce: target id out of range");
    // -log softmax via the max-subtracted form already inside probs;
    // guard against a denormal zero.
    losses[r] = -std::log(std::max(probs.at(r, static_cast<std::size_t>(t)),
                                   1e-300));
    if (dlogits) dlogits->at(r, static_cast<std::size_t>(t)) -= 1.0;
  }
  return losses;
}

std::vector<double> binary_ce_rows(const Tensor& logits, const Tensor& targets,
                                   Tensor* dlogits) {
  const std::size_t b = logits.rows(), v = logits.cols();
  if (!logits.same_shape(targets))
    throw DimensionError("binary ce: target shape disagrees");
  std::vector<double> losses(b, 0.0);
  if (dlogits) *dlogits = Tensor({b, v});
  for (std::size_t r = 0; r < b; ++r) {
    for (std::size_t c = 0; c < v; ++c) {
      const double y = targets.at(r, c);
      if (y != 0.0 && y != 1.0)
        throw TargetError("binary ce: target must be 0 or 1");
      const double z = logits.at(r, c);
      // max(z,0) - z*y + log(1 + exp(-|z|)): stable for any |z|.
      losses[r] += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
      if (dlogits)
        dlogits->at(r, c) = (sigmoid_scalar(z) - y) / static_cast<double>(v);
    }
    losses[r] /= static_cast<double>(v);
  }
  return losses;
}

ScalarLoss loss_softmax_ce(const Tensor& logits, const std::vector<int>& targets) {
  ScalarLoss out;
  const double b = static_cast<double>(logits.rows());
  std::vector<double> rows = softmax_ce_rows(logits, targets, &out.dlogits);
  for (double l : rows) out.value += l;
  out.value /= b;
  out.dlogits = scale(out.dlogits, 1.0 / b);
  return out;
}

ScalarLoss loss_binary_ce(const Tensor& logits, const Tensor& targets) {
  ScalarLoss out;
  const double b = static_cast<double>(logits.rows());
  std::vector<double> rows = binary_ce_rows(logits, targets, &out.dlogits);
  for (double l : rows) out.value += l;
  out.value /= b;
  out.dlogits = scale(out.dlogits, 1.0 / b);
  return out;
}

}  // namespace vtag
