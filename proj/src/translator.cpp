#include "vtag/translator.hpp"

#include <algorithm>
#include <cmath>

#include "vtag/errors.hpp"
#include "vtag/rng.hpp"

namespace vtag {

WordSequence canonicalize(const std::vector<int>& labels, std::size_t vocab) {
  if (labels.empty())
    throw LabelError("canonicalize: label set must be non-empty");
  std::vector<int> sorted = labels;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (int id : sorted)
    if (id < 0 || static_cast<std::size_t>(id) >= vocab)
      throw VocabularyError("canonicalize: label id " + std::to_string(id) +
                            " outside [0, " + std::to_string(vocab) + ")");
  WordSequence seq;
  seq.ids.reserve(sorted.size() + 2);
  seq.ids.push_back(static_cast<int>(vocab));  // BOS
  seq.ids.insert(seq.ids.end(), sorted.begin(), sorted.end());
  seq.ids.push_back(static_cast<int>(vocab) + 1);  // EOS
  return seq;
}

namespace {

int argmax_row(const Tensor& m, std::size_t row) {
  const double* p = m.data() + row * m.cols();
  int best = 0;
  for (std::size_t c = 1; c < m.cols(); ++c)
    if (p[c] > p[best]) best = static_cast<int>(c);
  return best;
}

}  // namespace

Translator::Translator(const TranslatorConfig& config)
    : config_(config),
      embedding_(config.vocab, config.embed_dim),
      projection_(config.hidden, config.vocab + 2),
      stack_(config.cell, config.depth, config.feat_dim + config.embed_dim,
             config.hidden, config.t_cap, config.bn_decay) {
  if (config.vocab == 0 || config.feat_dim == 0 || config.hidden == 0 ||
      config.embed_dim == 0)
    throw ConfigError("translator: dimensions must be positive");
  if (config.bn_projection)
    bn_projection_ = BatchNorm(config.vocab + 2, /*gamma_init=*/1.0,
                               /*learn_beta=*/true, config.bn_decay);
}

void Translator::init(Rng& rng) {
  embedding_.init(rng);
  stack_.init(rng);
  projection_.init(rng);
}

Translator::GuidedForward Translator::guided_forward(
    const Tensor& x, const std::vector<WordSequence>& targets,
    const GateConfig& gate, BnMode mode, bool record) {
  const std::size_t batch = x.rows();
  if (targets.size() != batch)
    throw DimensionError("guided_forward: target count disagrees with batch");
  if (x.cols() != config_.feat_dim)
    throw DimensionError("guided_forward: feature width disagrees");
  if (gate.beta < 0.0 || gate.beta > 1.0)
    throw ConfigError("guided_forward: beta must lie in [0, 1]");
  const double beta = (mode == BnMode::kInfer) ? 0.0 : gate.beta;

  for (std::size_t b = 0; b < batch; ++b) {
    const auto& ids = targets[b].ids;
    if (ids.size() < 3 || ids.front() != bos_id() || ids.back() != eos_id())
      throw LabelError("guided_forward: target sentence is not canonical");
    for (std::size_t k = 1; k + 1 < ids.size(); ++k) {
      if (ids[k] < 0 || static_cast<std::size_t>(ids[k]) >= config_.vocab)
        throw VocabularyError("guided_forward: tag outside vocabulary");
      if (k > 1 && ids[k] <= ids[k - 1])
        throw LabelError("guided_forward: tags must be strictly ascending");
    }
    if (b > 0 && targets[b].tag_count() > targets[b - 1].tag_count())
      throw LabelError("guided_forward: batch must be sorted by tag count descending");
  }

  const std::size_t v_ext = vocab_ext();
  const std::size_t steps = targets[0].tag_count() + 2;
  Rng gate_rng(gate.rng_seed);

  stack_.begin(batch, mode, record);
  trace_.clear();
  trace_valid_ = false;

  GuidedForward out;
  out.h_final = Tensor({batch, config_.hidden});

  std::vector<int> prev_argmax(batch, bos_id());

  for (std::size_t t = 1; t <= steps; ++t) {
    std::size_t rows = 0, loss_rows = 0;
    for (std::size_t b = 0; b < batch; ++b) {
      if (targets[b].tag_count() + 2 >= t) rows = b + 1;
      if (targets[b].tag_count() + 1 >= t) loss_rows = b + 1;
    }

    std::vector<int> fed(rows);
    std::vector<unsigned char> teacher(rows, 1);
    for (std::size_t b = 0; b < rows; ++b) {
      if (t == 1) {
        fed[b] = bos_id();
      } else if (b >= loss_rows) {
        fed[b] = eos_id();  // marker-fed feature step
      } else {
        const bool use_truth =
            beta >= 1.0 ? true
                        : (beta <= 0.0 ? false : gate_rng.bernoulli(beta));
        fed[b] = use_truth ? targets[b].ids[t - 1] : prev_argmax[b];
        teacher[b] = use_truth ? 1 : 0;
      }
    }

    Tensor w = embedding_.rows(fed);
    Tensor x_cat = concat(rows == batch ? x : x.top_rows(rows), w);
    Tensor h_top = stack_.step(x_cat);

    StepTrace st;
    st.rows = rows;
    st.loss_rows = loss_rows;
    st.fed_words = fed;
    st.teacher_fed = teacher;

    if (loss_rows > 0) {
      Tensor h_loss = h_top.top_rows(loss_rows);
      Tensor logits = projection_.forward(h_loss);
      if (config_.bn_projection) {
        const BnMode eff = (mode == BnMode::kTrain && loss_rows < 2)
                               ? BnMode::kInfer
                               : mode;
        logits = bn_projection_.forward(logits, eff, &st.bn_cache);
      }

      std::vector<int> step_targets(loss_rows);
      for (std::size_t b = 0; b < loss_rows; ++b)
        step_targets[b] = targets[b].ids[t];

      Tensor dunit;
      std::vector<double> row_losses;
      if (config_.loss_word == LossWordKind::kSoftmax) {
        row_losses = softmax_ce_rows(logits, step_targets, record ? &dunit : nullptr);
      } else {
        Tensor onehot({loss_rows, v_ext});
        for (std::size_t b = 0; b < loss_rows; ++b)
          onehot.at(b, static_cast<std::size_t>(step_targets[b])) = 1.0;
        row_losses = binary_ce_rows(logits, onehot, record ? &dunit : nullptr);
      }
      for (double l : row_losses) out.loss_word += l / static_cast<double>(batch);
      if (record) {
        st.h_loss = std::move(h_loss);
        st.dlogits = scale(dunit, 1.0 / static_cast<double>(batch));
      }

      for (std::size_t b = 0; b < loss_rows; ++b)
        prev_argmax[b] = argmax_row(logits, b);
      out.step_logits.push_back(std::move(logits));
    }

    for (std::size_t b = loss_rows; b < rows; ++b)
      for (std::size_t c = 0; c < config_.hidden; ++c)
        out.h_final.at(b, c) = h_top.at(b, c);

    out.fed_words.push_back(std::move(fed));
    out.teacher_fed.push_back(std::move(teacher));
    if (record) trace_.push_back(std::move(st));
  }

  trace_valid_ = record;
  return out;
}

void Translator::backward(const Tensor& dh_final) {
  if (!trace_valid_)
    throw DimensionError("translator backward: no recorded forward");
  stack_.begin_backward();

  for (std::size_t t = trace_.size(); t-- > 0;) {
    const StepTrace& st = trace_[t];
    Tensor dh_top({st.rows, config_.hidden});

    if (st.loss_rows > 0) {
      Tensor dl = st.dlogits;
      if (config_.bn_projection) dl = bn_projection_.backward(st.bn_cache, dl);
      Tensor dh_loss = projection_.backward(st.h_loss, dl);
      for (std::size_t b = 0; b < st.loss_rows; ++b)
        for (std::size_t c = 0; c < config_.hidden; ++c)
          dh_top.at(b, c) = dh_loss.at(b, c);
    }
    for (std::size_t b = st.loss_rows; b < st.rows; ++b)
      for (std::size_t c = 0; c < config_.hidden; ++c)
        dh_top.at(b, c) += dh_final.at(b, c);

    Tensor dx_cat = stack_.backward_step(dh_top);
    Tensor dw = slice_cols(dx_cat, config_.feat_dim,
                           config_.feat_dim + config_.embed_dim);

    // Ground-truth-fed rows train their embedding rows; the fed-back
    // embedding of a model prediction is treated as data.
    std::vector<int> ids;
    std::vector<std::size_t> rows_with_grad;
    for (std::size_t b = 0; b < st.rows; ++b)
      if (st.teacher_fed[b]) {
        ids.push_back(st.fed_words[b]);
        rows_with_grad.push_back(b);
      }
    if (!ids.empty()) {
      Tensor dsub({ids.size(), config_.embed_dim});
      for (std::size_t k = 0; k < rows_with_grad.size(); ++k)
        for (std::size_t c = 0; c < config_.embed_dim; ++c)
          dsub.at(k, c) = dw.at(rows_with_grad[k], c);
      embedding_.accumulate_grad(ids, dsub);
    }
  }
  trace_.clear();
  trace_valid_ = false;
}

Translator::Decode Translator::decode(const Tensor& x) {
  const std::size_t batch = x.rows();
  if (x.cols() != config_.feat_dim)
    throw DimensionError("decode: feature width disagrees");

  Decode out;
  out.step_dists.resize(batch);
  out.emitted.resize(batch);
  out.h_final = Tensor({batch, config_.hidden});

  stack_.begin(batch, BnMode::kInfer, /*record=*/false);

  // 0: predicting, 1: end marker fed next step (feature capture), 2: done.
  std::vector<int> phase(batch, 0);
  std::vector<int> words(batch, bos_id());

  for (std::size_t t = 1; t <= config_.t_max + 1; ++t) {
    Tensor w = embedding_.rows(words);
    Tensor h = stack_.step(concat(x, w));

    bool all_done = true;
    for (std::size_t b = 0; b < batch; ++b) {
      if (phase[b] == 1) {
        for (std::size_t c = 0; c < config_.hidden; ++c)
          out.h_final.at(b, c) = h.at(b, c);
        phase[b] = 2;
      }
      if (phase[b] != 2) all_done = false;
    }
    if (all_done) break;

    Tensor logits = projection_.forward(h);
    if (config_.bn_projection)
      logits = bn_projection_.forward(logits, BnMode::kInfer, nullptr,
                                      /*update_stats=*/false);
    Tensor dist = softmax(logits);

    for (std::size_t b = 0; b < batch; ++b) {
      if (phase[b] != 0) {
        words[b] = eos_id();
        continue;
      }
      out.step_dists[b].push_back(dist.row(b));
      const int pred = argmax_row(dist, b);
      out.emitted[b].push_back(pred);
      if (pred == eos_id() || t >= config_.t_max) {
        phase[b] = 1;
        words[b] = eos_id();
      } else {
        words[b] = pred;
      }
    }
  }
  return out;
}

std::vector<std::vector<double>> Translator::base_predict(const Tensor& x) {
  Decode dec = decode(x);
  std::vector<std::vector<double>> scores(x.rows(),
                                          std::vector<double>(config_.vocab, 0.0));
  for (std::size_t b = 0; b < x.rows(); ++b)
    for (const Tensor& dist : dec.step_dists[b])
      for (std::size_t v = 0; v < config_.vocab; ++v)
        scores[b][v] = std::max(scores[b][v], dist[v]);
  return scores;
}

Tensor Translator::extract_feature(const Tensor& x) {
  return decode(x).h_final;
}

void Translator::zero_grad() {
  embedding_.zero_grad();
  projection_.zero_grad();
  stack_.zero_grad();
  if (config_.bn_projection) bn_projection_.zero_grad();
}

void Translator::collect_params(std::vector<ParamRef>& out,
                                const std::string& prefix) {
  embedding_.collect_params(out, join_name(prefix, "embedding"));
  stack_.collect_params(out, join_name(prefix, "stack"));
  projection_.collect_params(out, join_name(prefix, "projection"));
  if (config_.bn_projection)
    bn_projection_.collect_params(out, join_name(prefix, "bn_projection"));
}

void Translator::collect_state(std::vector<StateRef>& out,
                               const std::string& prefix) {
  stack_.collect_state(out, join_name(prefix, "stack"));
  if (config_.bn_projection)
    bn_projection_.collect_state(out, join_name(prefix, "bn_projection"));
}

}  // namespace vtag
