#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vtag/params.hpp"
#include "vtag/tensor.hpp"

namespace vtag {

class Rng;

// Word embedding table over the label vocabulary plus the two reserved
// sentence markers, which occupy the trailing rows.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t vocab, std::size_t width);

  void init(Rng& rng, double stddev = 0.1);

  std::size_t vocab() const { return vocab_; }
  std::size_t vocab_ext() const { return vocab_ + 2; }
  std::size_t width() const { return width_; }
  int bos_id() const { return static_cast<int>(vocab_); }
  int eos_id() const { return static_cast<int>(vocab_) + 1; }

  // Row lookup; one output row per id. Throws VocabularyError on bad ids.
  Tensor rows(const std::vector<int>& ids) const;
  // Accumulates d (one row per id) into the gradient of the touched rows.
  void accumulate_grad(const std::vector<int>& ids, const Tensor& d);

  Tensor& table() { return table_; }
  const Tensor& table() const { return table_; }
  Tensor& grad() { return grad_; }

  void zero_grad() { grad_.fill(0.0); }
  void collect_params(std::vector<ParamRef>& out, const std::string& prefix);

 private:
  std::size_t vocab_ = 0;
  std::size_t width_ = 0;
  Tensor table_;  // [(vocab+2) x width]
  Tensor grad_;
};

// Affine map from hidden states to vocabulary logits, shared across
// timesteps.
class WordProjection {
 public:
  WordProjection() = default;
  WordProjection(std::size_t hidden_dim, std::size_t out_dim);

  void init(Rng& rng);

  std::size_t hidden_dim() const { return hidden_dim_; }
  std::size_t out_dim() const { return out_dim_; }

  Tensor forward(const Tensor& h) const;  // [B x out_dim]
  // Accumulates weight/bias grads; returns dh.
  Tensor backward(const Tensor& h, const Tensor& dlogits);

  Tensor& weight() { return w_; }
  Tensor& bias() { return b_; }

  void zero_grad();
  void collect_params(std::vector<ParamRef>& out, const std::string& prefix);

 private:
  std::size_t hidden_dim_ = 0;
  std::size_t out_dim_ = 0;
  Tensor w_, b_, dw_, db_;
};

enum class BnMode { kTrain, kInfer };

struct BnCache {
  Tensor xhat;     // [B x d]
  Tensor inv_std;  // [d]
  std::size_t batch = 0;
  bool batch_stats = false;  // true when batch statistics are in the graph
};

// Batch normalization over the feature axis. Train mode normalizes with
// batch statistics and folds them into the population estimates by
// exponential decay; infer mode reads the population estimates only.
class BatchNorm {
 public:
  BatchNorm() = default;
  BatchNorm(std::size_t dim, double gamma_init = 0.1, bool learn_beta = true,
            double decay = 0.999, double eps = 1e-5);

  std::size_t dim() const { return dim_; }
  double eps() const { return eps_; }

  // Train mode requires batch >= 2 (BatchSizeError otherwise). Population
  // statistics update uses the biased batch variance; set update_stats=false
  // to normalize without folding.
  Tensor forward(const Tensor& x, BnMode mode, BnCache* cache = nullptr,
                 bool update_stats = true);
  // Backward matching the cached forward: includes batch-statistic terms
  // when the cache came from a train-mode call.
  Tensor backward(const BnCache& cache, const Tensor& dy);

  Tensor& gamma() { return gamma_; }
  Tensor& beta() { return beta_; }
  Tensor& pop_mean() { return pop_mean_; }
  Tensor& pop_var() { return pop_var_; }

  void zero_grad();
  void collect_params(std::vector<ParamRef>& out, const std::string& prefix);
  void collect_state(std::vector<StateRef>& out, const std::string& prefix);

 private:
  std::size_t dim_ = 0;
  double decay_ = 0.999;
  double eps_ = 1e-5;
  bool learn_beta_ = true;
  Tensor gamma_, beta_, dgamma_, dbeta_;
  Tensor pop_mean_, pop_var_;
};

struct ScalarLoss {
  double value = 0.0;
  Tensor dlogits;
};

// Mean over the batch of -log softmax(logits)[target].
// Gradient: (softmax - onehot) / B.
ScalarLoss loss_softmax_ce(const Tensor& logits, const std::vector<int>& targets);

// Mean over B*V entries of the logit-form binary cross entropy.
// Gradient: (sigmoid(logit) - target) / (B*V). Targets must be 0/1.
ScalarLoss loss_binary_ce(const Tensor& logits, const Tensor& targets);

// Row-granular forms used by the sequence loss, which applies its own batch
// scaling. Returned per-row losses are unscaled; dlogits rows likewise
// (softmax - onehot, resp. (sigmoid - target)/V).
std::vector<double> softmax_ce_rows(const Tensor& logits,
                                    const std::vector<int>& targets,
                                    Tensor* dlogits);
std::vector<double> binary_ce_rows(const Tensor& logits, const Tensor& targets,
                                   Tensor* dlogits);

}  // namespace vtag
