#include "vtag/config.hpp"

#include <json.hpp>

#include "vtag/errors.hpp"

namespace vtag {

ModelKind parse_model_kind(const std::string& name) {
  if (name == "base-maxpool") return ModelKind::kBaseMaxpool;
  if (name == "guided-logistic") return ModelKind::kGuidedLogistic;
  if (name == "guided-moe") return ModelKind::kGuidedMoe;
  throw ConfigError("unknown model kind: " + name);
}

CellKind parse_cell_kind(const std::string& name) {
  if (name == "lstm") return CellKind::kLstm;
  if (name == "bnlstm") return CellKind::kBnLstm;
  throw ConfigError("unknown cell kind: " + name);
}

LossWordKind parse_loss_word(const std::string& name) {
  if (name == "softmax") return LossWordKind::kSoftmax;
  if (name == "binary") return LossWordKind::kBinary;
  throw ConfigError("unknown loss_word kind: " + name);
}

void validate_config(TrainConfig& config) {
  const ModelKind kind = parse_model_kind(config.model);
  parse_cell_kind(config.cell);
  if (config.beta < 0.0 || config.beta > 1.0)
    throw ConfigError("beta must lie in [0, 1]");
  if (config.hidden == 0 || config.embed_dim == 0 || config.depth == 0)
    throw ConfigError("hidden, embed_dim and depth must be positive");
  if (config.batch == 0) throw ConfigError("batch must be positive");
  if (config.cell == "bnlstm" && config.batch < 2)
    throw ConfigError("bnlstm training needs batch >= 2");
  if ((config.bn_feature || config.bn_projection) && config.batch < 2)
    throw ConfigError("batch-normalized layers need batch >= 2");
  if (config.learning_rate <= 0.0)
    throw ConfigError("learning rate must be positive");
  if (config.iterations == 0) throw ConfigError("iterations must be positive");
  if (config.lambda < 0.0) throw ConfigError("lambda must be >= 0");
  if (config.bn_decay <= 0.0 || config.bn_decay >= 1.0)
    throw ConfigError("bn_decay must lie in (0, 1)");
  if (config.t_max == 0 || config.t_cap == 0)
    throw ConfigError("t_max and t_cap must be positive");
  if (config.experts == 0) throw ConfigError("experts must be positive");
  if (config.log_every == 0) throw ConfigError("log_every must be positive");
  if (config.eval_batch == 0) throw ConfigError("eval_batch must be positive");

  if (config.loss_word == "auto")
    config.loss_word = kind == ModelKind::kBaseMaxpool ? "softmax" : "binary";
  parse_loss_word(config.loss_word);
}

ModelConfig to_model_config(const TrainConfig& config, std::size_t vocab,
                            std::size_t feat_dim) {
  ModelConfig mc;
  mc.kind = parse_model_kind(config.model);
  mc.cell = parse_cell_kind(config.cell);
  mc.vocab = vocab;
  mc.feat_dim = feat_dim;
  mc.hidden = config.hidden;
  mc.embed_dim = config.embed_dim;
  mc.depth = config.depth;
  mc.bn_feature = config.bn_feature;
  mc.bn_projection = config.bn_projection;
  mc.loss_word = parse_loss_word(config.loss_word);
  mc.lambda = config.lambda;
  mc.bn_decay = config.bn_decay;
  mc.t_max = config.t_max;
  mc.t_cap = config.t_cap;
  mc.experts = config.experts;
  return mc;
}

std::string config_to_json(const TrainConfig& config, std::size_t vocab,
                           std::size_t feat_dim) {
  nlohmann::ordered_json j;
  j["model"] = config.model;
  j["cell"] = config.cell;
  j["bn_feature"] = config.bn_feature;
  j["bn_projection"] = config.bn_projection;
  j["beta"] = config.beta;
  j["vocab"] = vocab;
  j["feat_dim"] = feat_dim;
  j["hidden"] = config.hidden;
  j["embed_dim"] = config.embed_dim;
  j["depth"] = config.depth;
  j["batch"] = config.batch;
  j["learning_rate"] = config.learning_rate;
  j["iterations"] = config.iterations;
  j["seed"] = config.seed;
  j["loss_word"] = config.loss_word;
  j["lambda"] = config.lambda;
  j["bn_decay"] = config.bn_decay;
  j["t_max"] = config.t_max;
  j["t_cap"] = config.t_cap;
  j["experts"] = config.experts;
  j["log_every"] = config.log_every;
  j["eval_every"] = config.eval_every;
  j["eval_batch"] = config.eval_batch;
  return j.dump(2) + "\n";
}

TrainConfig config_from_json(const std::string& json, std::size_t* vocab,
                             std::size_t* feat_dim) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("bad config manifest: ") + e.what());
  }
  TrainConfig config;
  try {
    config.model = j.at("model").get<std::string>();
    config.cell = j.at("cell").get<std::string>();
    config.bn_feature = j.at("bn_feature").get<bool>();
    config.bn_projection = j.at("bn_projection").get<bool>();
    config.beta = j.at("beta").get<double>();
    *vocab = j.at("vocab").get<std::size_t>();
    *feat_dim = j.at("feat_dim").get<std::size_t>();
    config.vocab = *vocab;
    config.hidden = j.at("hidden").get<std::size_t>();
    config.embed_dim = j.at("embed_dim").get<std::size_t>();
    config.depth = j.at("depth").get<std::size_t>();
    config.batch = j.at("batch").get<std::size_t>();
    config.learning_rate = j.at("learning_rate").get<double>();
    config.iterations = j.at("iterations").get<std::size_t>();
    config.seed = j.at("seed").get<std::uint64_t>();
    config.loss_word = j.at("loss_word").get<std::string>();
    config.lambda = j.at("lambda").get<double>();
    config.bn_decay = j.at("bn_decay").get<double>();
    config.t_max = j.at("t_max").get<std::size_t>();
    config.t_cap = j.at("t_cap").get<std::size_t>();
    config.experts = j.at("experts").get<std::size_t>();
    config.log_every = j.at("log_every").get<std::size_t>();
    config.eval_every = j.at("eval_every").get<std::size_t>();
    config.eval_batch = j.at("eval_batch").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("bad config manifest: ") + e.what());
  }
  return config;
}

}  // namespace vtag
