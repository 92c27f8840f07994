#include "vtag/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "vtag/checkpoint.hpp"
#include "vtag/errors.hpp"
#include "vtag/rng.hpp"

namespace vtag {

namespace {

// Stream tags for deriving independent RNG streams from the run seed.
enum : std::uint64_t { kInitStream = 1, kDataStream = 2, kGateStream = 3 };

std::vector<std::pair<std::string, Tensor*>> checkpoint_slots(
    GuidedModel& model, AdamOptimizer& optimizer) {
  std::vector<ParamRef> params;
  model.collect_params(params);
  std::vector<StateRef> state;
  model.collect_state(state);
  optimizer.collect_state(state);

  std::vector<std::pair<std::string, Tensor*>> slots;
  for (auto& p : params) slots.emplace_back(p.name, p.value);
  for (auto& s : state) slots.emplace_back(s.name, s.value);
  return slots;
}

}  // namespace

std::size_t dataset_feat_dim(const Dataset& dataset) {
  if (dataset.empty()) throw DimensionError("dataset is empty");
  const std::size_t dim = dataset[0].rgb.size() + dataset[0].audio.size();
  for (const auto& ex : dataset)
    if (ex.rgb.size() + ex.audio.size() != dim)
      throw DimensionError("dataset features are not uniform in width");
  return dim;
}

std::size_t dataset_vocab(const Dataset& dataset) {
  int max_label = -1;
  for (const auto& ex : dataset)
    for (int l : ex.labels) max_label = std::max(max_label, l);
  return static_cast<std::size_t>(max_label + 1);
}

TrainBatch make_batch(const Dataset& dataset,
                      const std::vector<std::size_t>& indices,
                      std::size_t vocab) {
  std::vector<std::size_t> order = indices;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dataset[a].labels.size() > dataset[b].labels.size();
  });

  const std::size_t b = order.size();
  if (b == 0) throw DimensionError("make_batch: empty index list");
  const std::size_t dim = dataset[order[0]].rgb.size() +
                          dataset[order[0]].audio.size();

  TrainBatch batch;
  batch.x = Tensor({b, dim});
  batch.multihot = Tensor({b, vocab});
  batch.targets.reserve(b);
  batch.truths.reserve(b);
  for (std::size_t r = 0; r < b; ++r) {
    const VideoExample& ex = dataset[order[r]];
    std::size_t c = 0;
    for (float v : ex.rgb) batch.x.at(r, c++) = static_cast<double>(v);
    for (float v : ex.audio) batch.x.at(r, c++) = static_cast<double>(v);
    batch.targets.push_back(canonicalize(ex.labels, vocab));
    for (int l : ex.labels) batch.multihot.at(r, static_cast<std::size_t>(l)) = 1.0;
    batch.truths.push_back(GroundTruth{ex.labels});
  }
  return batch;
}

MetricReport evaluate_model(GuidedModel& model, const Dataset& dataset,
                            std::size_t batch) {
  std::vector<ScoreVec> preds;
  std::vector<GroundTruth> truths;
  preds.reserve(dataset.size());
  truths.reserve(dataset.size());

  const std::size_t dim = dataset_feat_dim(dataset);
  for (std::size_t start = 0; start < dataset.size(); start += batch) {
    const std::size_t n = std::min(batch, dataset.size() - start);
    Tensor x({n, dim});
    for (std::size_t r = 0; r < n; ++r) {
      const VideoExample& ex = dataset[start + r];
      std::size_t c = 0;
      for (float v : ex.rgb) x.at(r, c++) = static_cast<double>(v);
      for (float v : ex.audio) x.at(r, c++) = static_cast<double>(v);
    }
    for (auto& s : model.predict(x)) preds.push_back(std::move(s));
    for (std::size_t r = 0; r < n; ++r)
      truths.push_back(GroundTruth{dataset[start + r].labels});
  }
  return compute_metrics(preds, truths);
}

std::string format_log_csv(const std::vector<TrainLogRow>& rows) {
  std::string out = "iteration,loss_word,loss_class,hit1,perr,gap\n";
  char buf[256];
  for (const auto& row : rows) {
    if (row.has_metrics) {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    row.iteration, row.loss_word, row.loss_class,
                    row.metrics.hit1, row.metrics.perr, row.metrics.gap);
    } else {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,,,\n", row.iteration,
                    row.loss_word, row.loss_class);
    }
    out += buf;
  }
  return out;
}

TrainResult train(TrainConfig config, const Dataset& train_data,
                  const Dataset& val_data, const std::string& run_dir) {
  validate_config(config);
  if (train_data.empty()) throw DimensionError("training dataset is empty");

  const std::size_t feat_dim = dataset_feat_dim(train_data);
  std::size_t vocab = config.vocab;
  if (vocab == 0)
    vocab = std::max(dataset_vocab(train_data),
                     val_data.empty() ? 0 : dataset_vocab(val_data));
  config.vocab = vocab;
  if (vocab == 0) throw ConfigError("vocabulary is empty");
  for (const auto& ex : train_data)
    if (ex.labels.empty())
      throw LabelError("training example without labels: " + ex.id);

  GuidedModel model(to_model_config(config, vocab, feat_dim));
  Rng init_rng(derive_seed(config.seed, kInitStream));
  model.init(init_rng);

  std::vector<ParamRef> params;
  model.collect_params(params);
  AdamOptimizer optimizer(config.learning_rate);
  optimizer.attach(params);

  Rng data_rng(derive_seed(config.seed, kDataStream));
  std::vector<std::size_t> order(train_data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t cursor = order.size();  // forces a shuffle on first use

  TrainResult result;
  result.config_json = config_to_json(config, vocab, feat_dim);

  const std::size_t batch_size = std::min(config.batch, train_data.size());
  for (std::size_t iter = 1; iter <= config.iterations; ++iter) {
    std::vector<std::size_t> indices(batch_size);
    for (std::size_t k = 0; k < batch_size; ++k) {
      if (cursor >= order.size()) {
        for (std::size_t i = order.size(); i > 1; --i)
          std::swap(order[i - 1], order[data_rng.below(i)]);
        cursor = 0;
      }
      indices[k] = order[cursor++];
    }
    TrainBatch batch = make_batch(train_data, indices, vocab);

    model.zero_grad();
    GateConfig gate{config.beta, derive_seed(config.seed, kGateStream + iter)};
    GuidedModel::StepLosses losses =
        model.train_step(batch.x, batch.targets, batch.multihot, gate);

    if (!std::isfinite(losses.total)) {
      std::string diag = "non-finite loss at iteration " + std::to_string(iter);
      double worst_norm = 0.0;
      std::string worst_name = "-";
      for (const auto& p : params) {
        double norm = 0.0;
        for (std::size_t i = 0; i < p.value->size(); ++i)
          norm += (*p.value)[i] * (*p.value)[i];
        norm = std::sqrt(norm);
        if (!std::isfinite(norm) || norm > worst_norm) {
          worst_norm = norm;
          worst_name = p.name;
          if (!std::isfinite(norm)) break;
        }
      }
      diag += "; parameter " + worst_name + " norm " + std::to_string(worst_norm);
      throw NumericError(diag);
    }
    optimizer.step();

    const bool last = iter == config.iterations;
    const bool log_now = last || iter % config.log_every == 0;
    const bool eval_now =
        (last && !val_data.empty()) ||
        (config.eval_every != 0 && iter % config.eval_every == 0 &&
         !val_data.empty());
    if (log_now || eval_now) {
      TrainLogRow row;
      row.iteration = iter;
      row.loss_word = losses.word;
      row.loss_class = losses.cls;
      if (eval_now) {
        row.has_metrics = true;
        row.metrics = evaluate_model(model, val_data, config.eval_batch);
        if (last) result.final_metrics = row.metrics;
      }
      result.log.push_back(row);
    }
  }

  if (!run_dir.empty()) {
    std::filesystem::create_directories(run_dir);
    {
      std::ofstream out(run_dir + "/config.json");
      out << result.config_json;
    }
    {
      std::ofstream out(run_dir + "/log.csv");
      out << format_log_csv(result.log);
    }
    CheckpointMeta meta;
    meta.iteration = config.iterations;
    meta.rng_state = data_rng.state();
    meta.manifest = result.config_json;
    std::vector<std::pair<std::string, const Tensor*>> slots;
    for (auto& [name, tensor] : checkpoint_slots(model, optimizer))
      slots.emplace_back(name, tensor);
    result.checkpoint_path = run_dir + "/checkpoint.bin";
    save_checkpoint(result.checkpoint_path, meta, slots);
  }
  return result;
}

MetricReport evaluate_checkpoint(const std::string& checkpoint_path,
                                 const Dataset& dataset) {
  CheckpointMeta meta = read_checkpoint_meta(checkpoint_path);
  std::size_t vocab = 0, feat_dim = 0;
  TrainConfig config = config_from_json(meta.manifest, &vocab, &feat_dim);
  validate_config(config);
  if (dataset_feat_dim(dataset) != feat_dim)
    throw CheckpointError("dataset feature width disagrees with checkpoint");

  GuidedModel model(to_model_config(config, vocab, feat_dim));
  AdamOptimizer optimizer(config.learning_rate);
  std::vector<ParamRef> params;
  model.collect_params(params);
  optimizer.attach(params);

  load_checkpoint(checkpoint_path, checkpoint_slots(model, optimizer));
  return evaluate_model(model, dataset, config.eval_batch);
}

}  // namespace vtag
