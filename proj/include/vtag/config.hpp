#pragma once

#include <cstdint>
#include <string>

#include "vtag/model.hpp"

namespace vtag {

// Run configuration. String-valued choices are validated and resolved by
// validate_config; the resolved form is echoed into the run directory and
// the checkpoint manifest.
struct TrainConfig {
  std::string model = "guided-logistic";  // base-maxpool|guided-logistic|guided-moe
  std::string cell = "lstm";              // lstm|bnlstm
  bool bn_feature = false;
  bool bn_projection = false;
  double beta = 1.0;
  std::size_t vocab = 0;  // 0: inferred from the dataset
  std::size_t hidden = 256;
  std::size_t embed_dim = 64;
  std::size_t depth = 2;
  std::size_t batch = 32;
  double learning_rate = 1e-3;
  std::size_t iterations = 1000;
  std::uint64_t seed = 1;
  std::string loss_word = "auto";  // auto|softmax|binary
  double lambda = 1.0;
  double bn_decay = 0.999;
  std::size_t t_max = 32;
  std::size_t t_cap = 32;
  std::size_t experts = 2;
  std::size_t log_every = 10;
  std::size_t eval_every = 0;  // 0: only at the end
  std::size_t eval_batch = 128;
};

// Throws ConfigError on any out-of-range field; resolves loss_word=auto
// (softmax for the base model, binary for the guided ones).
void validate_config(TrainConfig& config);

ModelKind parse_model_kind(const std::string& name);
CellKind parse_cell_kind(const std::string& name);
LossWordKind parse_loss_word(const std::string& name);

ModelConfig to_model_config(const TrainConfig& config, std::size_t vocab,
                            std::size_t feat_dim);

// Resolved-config echo with the dataset-derived geometry included.
std::string config_to_json(const TrainConfig& config, std::size_t vocab,
                           std::size_t feat_dim);
// Inverse used when rebuilding a model from a checkpoint manifest.
TrainConfig config_from_json(const std::string& json, std::size_t* vocab,
                             std::size_t* feat_dim);

}  // namespace vtag
