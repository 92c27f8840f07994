#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vtag/layers.hpp"
#include "vtag/lstm.hpp"
#include "vtag/params.hpp"
#include "vtag/tensor.hpp"

namespace vtag {

// Label sentence: [BOS, y_1, ..., y_T, EOS] with strictly ascending tags.
struct WordSequence {
  std::vector<int> ids;
  std::size_t tag_count() const { return ids.size() - 2; }
};

// Deterministic sentence form of a label set: ascending ids wrapped in the
// sentence markers. Throws LabelError on an empty set, VocabularyError on
// ids outside [0, vocab).
WordSequence canonicalize(const std::vector<int>& labels, std::size_t vocab);

// Stochastic gate configuration. beta is the probability that a step's word
// input is the ground-truth previous word rather than the model's own
// previous output; inference always behaves as beta
// = 0.
struct GateConfig {
  double beta = 1.0;
  std::uint64_t rng_seed = 0;
};

enum class LossWordKind { kSoftmax, kBinary };

struct TranslatorConfig {
  std::size_t vocab = 0;
  std::size_t feat_dim = 0;
  std::size_t hidden = 256;
  std::size_t embed_dim = 64;
  std::size_t depth = 2;
  CellKind cell = CellKind::kLstm;
  bool bn_projection = false;
  double bn_decay = 0.999;
  LossWordKind loss_word = LossWordKind::kSoftmax;
  std::size_t t_max = 32;
  std::size_t t_cap = 32;
};

// Drives the recurrent stack over (feature ++ word embedding) inputs.
// Training follows the target sentences with the stochastic gate deciding
// each step's word input; after the last predicted word one more step runs
// on the end marker to produce the classifier feature.
class Translator {
 public:
  explicit Translator(const TranslatorConfig& config);

  void init(Rng& rng);

  const TranslatorConfig& config() const { return config_; }
  std::size_t vocab_ext() const { return config_.vocab + 2; }
  int bos_id() const { return embedding_.bos_id(); }
  int eos_id() const { return embedding_.eos_id(); }

  struct GuidedForward {
    // Per prediction step t: logits over the extended vocabulary for the
    // rows still inside their sentence ([L_t x V_ext]).
    std::vector<Tensor> step_logits;
    // Word id fed at each step per active row, and whether it came from the
    // ground truth (as opposed to the model's own previous output).
    std::vector<std::vector<int>> fed_words;
    std::vector<std::vector<unsigned char>> teacher_fed;
    Tensor h_final;  // [B x hidden], the marker-fed step's top hidden
    double loss_word = 0.0;
  };

  // Batch must be sorted by tag count descending. record=true retains the
  // caches consumed by backward().
  GuidedForward guided_forward(const Tensor& x,
                               const std::vector<WordSequence>& targets,
                               const GateConfig& gate, BnMode mode,
                               bool record);

  // Backpropagates the recorded forward. dh_final carries the gradient into
  // each sample's final hidden (zero tensor when no classifier is attached).
  void backward(const Tensor& dh_final);

  struct Decode {
    std::vector<std::vector<Tensor>> step_dists;  // per sample, each [V_ext]
    std::vector<std::vector<int>> emitted;        // per sample predicted ids
    Tensor h_final;                               // [B x hidden]
  };

  // Feedback-only decoding (gate closed), up to t_max prediction steps per
  // sample, stopping early once the end marker is emitted.
  Decode decode(const Tensor& x);

  // Elementwise max over the per-step softmax distributions, marker columns
  // dropped: one score vector over the vocabulary per sample.
  std::vector<std::vector<double>> base_predict(const Tensor& x);

  // Final hidden state after the marker-fed step, under feedback decoding.
  Tensor extract_feature(const Tensor& x);

  EmbeddingTable& embedding() { return embedding_; }
  WordProjection& projection() { return projection_; }
  RecurrentStack& stack() { return stack_; }
  BatchNorm& bn_projection() { return bn_projection_; }

  void zero_grad();
  void collect_params(std::vector<ParamRef>& out, const std::string& prefix);
  void collect_state(std::vector<StateRef>& out, const std::string& prefix);

 private:
  struct StepTrace {
    std::size_t rows = 0;       // rows stepped
    std::size_t loss_rows = 0;  // rows with a prediction target
    std::vector<int> fed_words;
    std::vector<unsigned char> teacher_fed;
    Tensor h_loss;    // [loss_rows x hidden], input to the projection
    Tensor dlogits;   // scaled loss gradient at the (possibly normalized) logits
    BnCache bn_cache; // set when bn_projection is enabled
  };

  TranslatorConfig config_;
  EmbeddingTable embedding_;
  WordProjection projection_;
  RecurrentStack stack_;
  BatchNorm bn_projection_;
  std::vector<StepTrace> trace_;
  bool trace_valid_ = false;
};

}  // namespace vtag
