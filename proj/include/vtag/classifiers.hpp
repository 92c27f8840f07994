#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vtag/params.hpp"
#include "vtag/tensor.hpp"

namespace vtag {

class Rng;

// Per-class sigmoid over an affine map of the feature.
class LogisticHead {
 public:
  LogisticHead() = default;
  LogisticHead(std::size_t feat_dim, std::size_t classes);

  void init(Rng& rng);

  std::size_t feat_dim() const { return feat_dim_; }
  std::size_t classes() const { return classes_; }

  Tensor logits(const Tensor& f) const;  // [B x classes]
  Tensor scores(const Tensor& f) const;  // sigmoid(logits)

  // Mean binary cross entropy against 0/1 targets; gradients are
  // accumulated with the given weight, and dfeature (also weighted) is
  // returned through the out-param. The returned loss is unweighted.
  double train(const Tensor& f, const Tensor& targets, double weight,
               Tensor* dfeature);

  Tensor& weight() { return w_; }
  Tensor& bias() { return b_; }

  void zero_grad();
  void collect_params(std::vector<ParamRef>& out, const std::string& prefix);

 private:
  std::size_t feat_dim_ = 0;
  std::size_t classes_ = 0;
  Tensor w_, b_, dw_, db_;
};

// Mixture of experts per class: a softmax gate over E experts plus a dummy
// zero-score expert; the class score is the gate-weighted sum of the expert
// sigmoids.
class MoeHead {
 public:
  MoeHead() = default;
  MoeHead(std::size_t feat_dim, std::size_t classes, std::size_t experts);

  void init(Rng& rng);

  std::size_t feat_dim() const { return feat_dim_; }
  std::size_t classes() const { return classes_; }
  std::size_t experts() const { return experts_; }

  Tensor scores(const Tensor& f) const;  // [B x classes], entries in (0, 1)

  // Mean binary cross entropy on the mixture probabilities; semantics as
  // LogisticHead::train.
  double train(const Tensor& f, const Tensor& targets, double weight,
               Tensor* dfeature);

  Tensor& gate_weight() { return gate_w_; }
  Tensor& expert_weight() { return expert_w_; }

  void zero_grad();
  void collect_params(std::vector<ParamRef>& out, const std::string& prefix);

 private:
  void mixture(const Tensor& f, Tensor* gates, Tensor* expert_sig,
               Tensor* scores) const;

  std::size_t feat_dim_ = 0;
  std::size_t classes_ = 0;
  std::size_t experts_ = 0;
  Tensor gate_w_;    // [feat_dim x classes*(experts+1)]
  Tensor expert_w_;  // [feat_dim x classes*experts]
  Tensor dgate_w_, dexpert_w_;
};

}  // namespace vtag
