#pragma once

#include <string>
#include <vector>

#include "vtag/config.hpp"
#include "vtag/data.hpp"
#include "vtag/metrics.hpp"
#include "vtag/model.hpp"
#include "vtag/optimizer.hpp"

namespace vtag {

struct TrainBatch {
  Tensor x;  // [B x feat_dim], rows sorted by tag count descending
  std::vector<WordSequence> targets;
  Tensor multihot;  // [B x vocab]
  std::vector<GroundTruth> truths;
};

TrainBatch make_batch(const Dataset& dataset,
                      const std::vector<std::size_t>& indices,
                      std::size_t vocab);

// Feature width of a dataset (rgb + audio); DimensionError if not uniform.
std::size_t dataset_feat_dim(const Dataset& dataset);
// Smallest vocabulary covering every label.
std::size_t dataset_vocab(const Dataset& dataset);

struct TrainLogRow {
  std::size_t iteration = 0;
  double loss_word = 0.0;
  double loss_class = 0.0;
  bool has_metrics = false;
  MetricReport metrics;
};

std::string format_log_csv(const std::vector<TrainLogRow>& rows);

struct TrainResult {
  std::vector<TrainLogRow> log;
  MetricReport final_metrics;
  std::string checkpoint_path;  // empty without a run directory
  std::string config_json;
};

// Full training loop: Adam over loss_word + lambda*loss_class, periodic
// validation, deterministic under the seed. When run_dir is non-empty the
// resolved config, the CSV log and the final checkpoint are written there.
TrainResult train(TrainConfig config, const Dataset& train_data,
                  const Dataset& val_data, const std::string& run_dir = "");

MetricReport evaluate_model(GuidedModel& model, const Dataset& dataset,
                            std::size_t batch);

// Rebuilds the model from the checkpoint manifest and evaluates it.
MetricReport evaluate_checkpoint(const std::string& checkpoint_path,
                                 const Dataset& dataset);

}  // namespace vtag
