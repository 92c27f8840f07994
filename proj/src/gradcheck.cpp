#include "vtag/gradcheck.hpp"

#include <cmath>
#include <cstdio>

#include "vtag/model.hpp"
#include "vtag/rng.hpp"
#include "vtag/trainer.hpp"

namespace vtag {

namespace {

struct TinyCase {
  std::string name;
  ModelConfig config;
};

std::vector<TinyCase> tiny_cases() {
  ModelConfig base;
  base.vocab = 5;
  base.feat_dim = 3;
  base.hidden = 4;
  base.embed_dim = 3;
  base.depth = 2;
  base.t_max = 6;
  base.t_cap = 4;
  base.experts = 2;
  base.lambda = 1.0;

  std::vector<TinyCase> cases;
  {
    ModelConfig c = base;
    c.kind = ModelKind::kBaseMaxpool;
    c.cell = CellKind::kLstm;
    c.loss_word = LossWordKind::kSoftmax;
    cases.push_back({"lstm-base-softmax", c});
  }
  {
    ModelConfig c = base;
    c.kind = ModelKind::kGuidedLogistic;
    c.cell = CellKind::kLstm;
    c.loss_word = LossWordKind::kBinary;
    c.bn_feature = true;
    c.bn_projection = true;
    cases.push_back({"lstm-logistic-binary-bn", c});
  }
  {
    ModelConfig c = base;
    c.kind = ModelKind::kGuidedLogistic;
    c.cell = CellKind::kBnLstm;
    c.loss_word = LossWordKind::kSoftmax;
    cases.push_back({"bnlstm-logistic-softmax", c});
  }
  {
    ModelConfig c = base;
    c.kind = ModelKind::kGuidedMoe;
    c.cell = CellKind::kLstm;
    c.loss_word = LossWordKind::kBinary;
    cases.push_back({"lstm-moe-binary", c});
  }
  return cases;
}

// Snapshot/restore of every parameter and state tensor so each finite
// difference evaluation starts from the same point (train-mode BN mutates
// its population statistics).
struct ModelSnapshot {
  std::vector<Tensor> values;

  static ModelSnapshot take(const std::vector<ParamRef>& params,
                            const std::vector<StateRef>& state) {
    ModelSnapshot s;
    for (const auto& p : params) s.values.push_back(*p.value);
    for (const auto& st : state) s.values.push_back(*st.value);
    return s;
  }

  void restore(const std::vector<ParamRef>& params,
               const std::vector<StateRef>& state) const {
    std::size_t k = 0;
    for (const auto& p : params) *p.value = values[k++];
    for (const auto& st : state) *st.value = values[k++];
  }
};

}  // namespace

GradCheckReport run_gradcheck(std::uint64_t seed, double tolerance,
                              double step) {
  GradCheckReport report;

  for (const TinyCase& tc : tiny_cases()) {
    GuidedModel model(tc.config);
    Rng init_rng(derive_seed(seed, 100));
    model.init(init_rng);

    std::vector<ParamRef> params;
    model.collect_params(params);
    std::vector<StateRef> state;
    model.collect_state(state);

    // Fixed tiny batch with uniform tag counts, so every train-mode BN call
    // sees the full batch and the finite differences stay consistent.
    const std::size_t batch = 3, tags = 2;
    Rng data_rng(derive_seed(seed, 200));
    Tensor x = Tensor::randn({batch, tc.config.feat_dim}, data_rng);
    std::vector<WordSequence> targets;
    Tensor multihot({batch, tc.config.vocab});
    for (std::size_t b = 0; b < batch; ++b) {
      std::vector<int> labels;
      while (labels.size() < tags) {
        int l = static_cast<int>(data_rng.below(tc.config.vocab));
        bool dup = false;
        for (int e : labels) dup = dup || e == l;
        if (!dup) labels.push_back(l);
      }
      targets.push_back(canonicalize(labels, tc.config.vocab));
      for (int l : labels) multihot.at(b, static_cast<std::size_t>(l)) = 1.0;
    }
    const GateConfig gate{1.0, derive_seed(seed, 300)};

    const ModelSnapshot snapshot = ModelSnapshot::take(params, state);
    auto loss_at = [&]() {
      return model.train_step(x, targets, multihot, gate).total;
    };

    // Analytic gradients once.
    snapshot.restore(params, state);
    model.zero_grad();
    model.train_step(x, targets, multihot, gate);
    std::vector<Tensor> analytic;
    for (const auto& p : params) analytic.push_back(*p.grad);

    for (std::size_t k = 0; k < params.size(); ++k) {
      GradCheckRow row;
      row.config = tc.name;
      row.group = params[k].name;
      row.entries = params[k].value->size();
      row.pass = true;
      for (std::size_t i = 0; i < params[k].value->size(); ++i) {
        snapshot.restore(params, state);
        (*params[k].value)[i] += step;
        const double plus = loss_at();
        snapshot.restore(params, state);
        (*params[k].value)[i] -= step;
        const double minus = loss_at();
        const double numeric = (plus - minus) / (2.0 * step);
        const double a = analytic[k][i];
        const double denom = std::max({std::abs(a), std::abs(numeric), 1e-10});
        const double rel = std::abs(a - numeric) / denom;
        if (std::abs(a - numeric) >
            std::max(tolerance * std::max(std::abs(a), std::abs(numeric)),
                     1e-10)) {
          row.pass = false;
        }
        row.max_rel_err = std::max(row.max_rel_err, rel);
      }
      report.pass = report.pass && row.pass;
      report.rows.push_back(std::move(row));
    }
    snapshot.restore(params, state);
  }
  return report;
}

std::string format_gradcheck(const GradCheckReport& report) {
  std::string out =
      "config                         group                                   "
      "entries   max_rel_err  result\n";
  char buf[256];
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%-30s %-40s %7zu  %12.3e  %s\n",
                  row.config.c_str(), row.group.c_str(), row.entries,
                  row.max_rel_err, row.pass ? "pass" : "FAIL");
    out += buf;
  }
  out += report.pass ? "gradcheck: PASS\n" : "gradcheck: FAIL\n";
  return out;
}

}  // namespace vtag
