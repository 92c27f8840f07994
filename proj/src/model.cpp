#include "vtag/model.hpp"

#include "vtag/errors.hpp"
#include "vtag/rng.hpp"

namespace vtag {

TranslatorConfig translator_config(const ModelConfig& config) {
  TranslatorConfig tc;
  tc.vocab = config.vocab;
  tc.feat_dim = config.feat_dim;
  tc.hidden = config.hidden;
  tc.embed_dim = config.embed_dim;
  tc.depth = config.depth;
  tc.cell = config.cell;
  tc.bn_projection = config.bn_projection;
  tc.bn_decay = config.bn_decay;
  tc.loss_word = config.loss_word;
  tc.t_max = config.t_max;
  tc.t_cap = config.t_cap;
  return tc;
}

GuidedModel::GuidedModel(const ModelConfig& config)
    : config_(config), translator_(translator_config(config)) {
  if (config.bn_feature)
    bn_feature_ = BatchNorm(config.hidden, /*gamma_init=*/1.0,
                            /*learn_beta=*/true, config.bn_decay);
  if (config.kind == ModelKind::kGuidedLogistic)
    logistic_ = LogisticHead(config.hidden, config.vocab);
  else if (config.kind == ModelKind::kGuidedMoe)
    moe_ = MoeHead(config.hidden, config.vocab, config.experts);
}

void GuidedModel::init(Rng& rng) {
  translator_.init(rng);
  if (config_.kind == ModelKind::kGuidedLogistic) logistic_.init(rng);
  if (config_.kind == ModelKind::kGuidedMoe) moe_.init(rng);
}

GuidedModel::StepLosses GuidedModel::train_step(
    const Tensor& x, const std::vector<WordSequence>& targets,
    const Tensor& label_multihot, const GateConfig& gate) {
  StepLosses losses;
  Translator::GuidedForward fwd = translator_.guided_forward(
      x, targets, gate, BnMode::kTrain, /*record=*/true);
  losses.word = fwd.loss_word;

  Tensor dh_final({x.rows(), config_.hidden});
  if (has_head()) {
    Tensor feature = fwd.h_final;
    BnCache bn_cache;
    if (config_.bn_feature)
      feature = bn_feature_.forward(feature, BnMode::kTrain, &bn_cache);

    Tensor dfeature;
    if (config_.kind == ModelKind::kGuidedLogistic)
      losses.cls = logistic_.train(feature, label_multihot, config_.lambda,
                                   &dfeature);
    else
      losses.cls = moe_.train(feature, label_multihot, config_.lambda,
                              &dfeature);

    dh_final = config_.bn_feature ? bn_feature_.backward(bn_cache, dfeature)
                                  : dfeature;
  }

  translator_.backward(dh_final);
  losses.total = losses.word + config_.lambda * losses.cls;
  return losses;
}

std::vector<std::vector<double>> GuidedModel::predict(const Tensor& x) {
  if (!has_head()) return translator_.base_predict(x);

  Tensor feature = translator_.extract_feature(x);
  if (config_.bn_feature)
    feature = bn_feature_.forward(feature, BnMode::kInfer, nullptr,
                                  /*update_stats=*/false);
  Tensor s = config_.kind == ModelKind::kGuidedLogistic ? logistic_.scores(feature)
                                                        : moe_.scores(feature);
  std::vector<std::vector<double>> out(x.rows(),
                                       std::vector<double>(config_.vocab));
  for (std::size_t b = 0; b < x.rows(); ++b)
    for (std::size_t v = 0; v < config_.vocab; ++v) out[b][v] = s.at(b, v);
  return out;
}

void GuidedModel::zero_grad() {
  translator_.zero_grad();
  if (config_.bn_feature) bn_feature_.zero_grad();
  if (config_.kind == ModelKind::kGuidedLogistic) logistic_.zero_grad();
  if (config_.kind == ModelKind::kGuidedMoe) moe_.zero_grad();
}

void GuidedModel::collect_params(std::vector<ParamRef>& out,
                                 const std::string& prefix) {
  translator_.collect_params(out, join_name(prefix, "translator"));
  if (config_.bn_feature)
    bn_feature_.collect_params(out, join_name(prefix, "bn_feature"));
  if (config_.kind == ModelKind::kGuidedLogistic)
    logistic_.collect_params(out, join_name(prefix, "classifier"));
  if (config_.kind == ModelKind::kGuidedMoe)
    moe_.collect_params(out, join_name(prefix, "classifier"));
}

void GuidedModel::collect_state(std::vector<StateRef>& out,
                                const std::string& prefix) {
  translator_.collect_state(out, join_name(prefix, "translator"));
  if (config_.bn_feature)
    bn_feature_.collect_state(out, join_name(prefix, "bn_feature"));
}

}  // namespace vtag
