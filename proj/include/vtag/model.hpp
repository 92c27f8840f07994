#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vtag/classifiers.hpp"
#include "vtag/layers.hpp"
#include "vtag/translator.hpp"

namespace vtag {

enum class ModelKind { kBaseMaxpool, kGuidedLogistic, kGuidedMoe };

struct ModelConfig {
  ModelKind kind = ModelKind::kGuidedLogistic;
  CellKind cell = CellKind::kLstm;
  std::size_t vocab = 0;
  std::size_t feat_dim = 0;
  std::size_t hidden = 256;
  std::size_t embed_dim = 64;
  std::size_t depth = 2;
  bool bn_feature = false;
  bool bn_projection = false;
  LossWordKind loss_word = LossWordKind::kSoftmax;
  double lambda = 1.0;  // weight of the classifier loss in the total
  double bn_decay = 0.999;
  std::size_t t_max = 32;
  std::size_t t_cap = 32;
  std::size_t experts = 2;
};

// Full video classifier: the translator plus (for the guided variants) an
// optional feature batch norm and a classifier head trained jointly on the
// final hidden state.
class GuidedModel {
 public:
  explicit GuidedModel(const ModelConfig& config);

  void init(Rng& rng);
  const ModelConfig& config() const { return config_; }
  bool has_head() const { return config_.kind != ModelKind::kBaseMaxpool; }

  struct StepLosses {
    double word = 0.0;
    double cls = 0.0;
    double total = 0.0;
  };

  // One training forward/backward over a batch sorted by tag count
  // descending. Gradients accumulate into the parameter slots; the caller
  // zeroes them and applies the optimizer step.
  StepLosses train_step(const Tensor& x, const std::vector<WordSequence>& targets,
                        const Tensor& label_multihot, const GateConfig& gate);

  // Inference-mode scores over the vocabulary, one vector per sample.
  std::vector<std::vector<double>> predict(const Tensor& x);

  Tensor extract_feature(const Tensor& x) { return translator_.extract_feature(x); }

  Translator& translator() { return translator_; }
  BatchNorm& bn_feature() { return bn_feature_; }
  LogisticHead& logistic() { return logistic_; }
  MoeHead& moe() { return moe_; }

  void zero_grad();
  void collect_params(std::vector<ParamRef>& out, const std::string& prefix = "");
  void collect_state(std::vector<StateRef>& out, const std::string& prefix = "");

 private:
  ModelConfig config_;
  Translator translator_;
  BatchNorm bn_feature_;
  LogisticHead logistic_;
  MoeHead moe_;
};

TranslatorConfig translator_config(const ModelConfig& config);

}  // namespace vtag
