// Command-line front end: train/eval the video-tag translator models, run
// the gradient checker, analyze the gating chain, and build or inspect
// record files. Every flag can also be set through the environment with the
// VTAG_ prefix (e.g. VTAG_BETA for --beta).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vtag/config.hpp"
#include "vtag/errors.hpp"
#include "vtag/gating.hpp"
#include "vtag/gradcheck.hpp"
#include "vtag/metrics.hpp"
#include "vtag/synthetic.hpp"
#include "vtag/tfrecord.hpp"
#include "vtag/trainer.hpp"

namespace {

std::string env_name(const std::string& flag) {
  std::string name = "VTAG_";
  for (char c : flag)
    name += c == '-' ? '_' : static_cast<char>(std::toupper(c));
  return name;
}

template <typename T>
CLI::Option* add_flag_env(CLI::App* app, const std::string& name,
                          T& destination, const std::string& description) {
  auto* opt = app->add_option(name, destination, description);
  opt->envname(env_name(name.substr(2)));
  return opt;
}

vtag::ExampleSchema schema_from(std::size_t rgb_dim, std::size_t audio_dim) {
  vtag::ExampleSchema schema;
  schema.rgb_dim = rgb_dim;
  schema.audio_dim = audio_dim;
  return schema;
}

int cmd_train(const vtag::TrainConfig& config,
              const std::vector<std::string>& train_paths,
              const std::vector<std::string>& val_paths,
              std::size_t rgb_dim, std::size_t audio_dim,
              const std::string& run_dir) {
  const vtag::ExampleSchema schema = schema_from(rgb_dim, audio_dim);
  vtag::Dataset train_data = vtag::load_dataset(train_paths, schema);
  vtag::Dataset val_data =
      val_paths.empty() ? vtag::Dataset{} : vtag::load_dataset(val_paths, schema);

  vtag::TrainResult result = vtag::train(config, train_data, val_data, run_dir);
  std::cout << vtag::format_log_csv(result.log);
  if (!val_data.empty()) vtag::write_report_text(std::cerr, result.final_metrics);
  if (!result.checkpoint_path.empty())
    std::cerr << "checkpoint: " << result.checkpoint_path << "\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint,
             const std::vector<std::string>& data_paths, std::size_t rgb_dim,
             std::size_t audio_dim) {
  vtag::Dataset data =
      vtag::load_dataset(data_paths, schema_from(rgb_dim, audio_dim));
  vtag::MetricReport report = vtag::evaluate_checkpoint(checkpoint, data);
  vtag::write_report_csv(std::cout, report);
  vtag::write_report_text(std::cerr, report);
  return 0;
}

int cmd_gradcheck(std::uint64_t seed, double tolerance) {
  vtag::GradCheckReport report = vtag::run_gradcheck(seed, tolerance);
  std::cout << vtag::format_gradcheck(report);
  return report.pass ? 0 : 1;
}

int cmd_gating(double p_min, double p_max, std::size_t grid,
               const std::vector<double>& betas, std::size_t trials,
               std::uint64_t seed, const std::string& csv_path) {
  std::vector<double> ps, qs;
  for (std::size_t i = 0; i < grid; ++i) {
    const double v =
        grid == 1 ? p_min
                  : p_min + (p_max - p_min) * static_cast<double>(i) /
                                static_cast<double>(grid - 1);
    ps.push_back(v);
    qs.push_back(v);
  }
  auto cells = vtag::ordering_report(ps, qs, betas, trials, seed);
  if (csv_path.empty()) {
    vtag::write_ordering_csv(std::cout, cells);
  } else {
    std::ofstream out(csv_path);
    vtag::write_ordering_csv(out, cells);
    std::cerr << "wrote " << cells.size() << " cells to " << csv_path << "\n";
  }
  return 0;
}

int cmd_make_synthetic(const vtag::SyntheticTaskSpec& spec, std::size_t count,
                       std::size_t start, const std::string& out_path) {
  vtag::Dataset ds = vtag::generate_synthetic(spec, count, start);
  vtag::save_dataset(out_path, ds, vtag::synthetic_schema(spec));
  std::cerr << "wrote " << ds.size() << " examples to " << out_path << "\n";
  return 0;
}

int cmd_inspect(const std::string& path, bool parse, std::size_t rgb_dim,
                std::size_t audio_dim, std::size_t limit) {
  std::vector<std::string> records = vtag::read_record_file(path);
  std::cout << "records: " << records.size() << "\n";
  const vtag::ExampleSchema schema = schema_from(rgb_dim, audio_dim);
  if (parse) {
    for (std::size_t i = 0; i < records.size() && i < limit; ++i) {
      vtag::VideoExample ex = vtag::parse_example(records[i], schema);
      std::cout << i << ": id=" << ex.id << " labels=" << ex.labels.size()
                << " rgb=" << ex.rgb.size() << " audio=" << ex.audio.size()
                << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Video-tag translator: training, evaluation and analysis"};
  app.require_subcommand(1);

  // --- train ---
  auto* train = app.add_subcommand("train", "Train a model on record files");
  vtag::TrainConfig config;
  std::vector<std::string> train_paths, val_paths;
  std::string run_dir = "run";
  std::size_t rgb_dim = 1024, audio_dim = 128;
  train->add_option("--train", train_paths, "Training record files")->required();
  train->add_option("--val", val_paths, "Validation record files");
  add_flag_env(train, "--run-dir", run_dir, "Output directory");
  add_flag_env(train, "--model", config.model,
               "base-maxpool|guided-logistic|guided-moe");
  add_flag_env(train, "--cell", config.cell, "lstm|bnlstm");
  train->add_flag("--bn-feature", config.bn_feature,
                  "Batch norm between final hidden and classifier");
  train->add_flag("--bn-projection", config.bn_projection,
                  "Batch norm on word projection logits");
  add_flag_env(train, "--beta", config.beta, "Label injection probability");
  add_flag_env(train, "--vocab", config.vocab, "Vocabulary size (0: infer)");
  add_flag_env(train, "--hidden", config.hidden, "Hidden width");
  add_flag_env(train, "--embed-dim", config.embed_dim, "Word embedding width");
  add_flag_env(train, "--depth", config.depth, "Stacked cell count");
  add_flag_env(train, "--batch", config.batch, "Minibatch size");
  add_flag_env(train, "--lr", config.learning_rate, "Learning rate");
  add_flag_env(train, "--iterations", config.iterations, "Training iterations");
  add_flag_env(train, "--seed", config.seed, "Run seed");
  add_flag_env(train, "--loss-word", config.loss_word, "auto|softmax|binary");
  add_flag_env(train, "--lambda", config.lambda, "Classifier loss weight");
  add_flag_env(train, "--bn-decay", config.bn_decay,
               "Population statistics decay");
  add_flag_env(train, "--t-max", config.t_max, "Decode step cap");
  add_flag_env(train, "--t-cap", config.t_cap, "Per-step BN statistics cap");
  add_flag_env(train, "--experts", config.experts, "Mixture expert count");
  add_flag_env(train, "--log-every", config.log_every, "Loss log period");
  add_flag_env(train, "--eval-every", config.eval_every,
               "Validation period (0: final only)");
  add_flag_env(train, "--eval-batch", config.eval_batch, "Validation batch");
  add_flag_env(train, "--rgb-dim", rgb_dim, "Schema rgb feature length");
  add_flag_env(train, "--audio-dim", audio_dim, "Schema audio feature length");

  // --- eval ---
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  std::string checkpoint;
  std::vector<std::string> eval_paths;
  std::size_t eval_rgb = 1024, eval_audio = 128;
  eval->add_option("--checkpoint", checkpoint, "Checkpoint path")->required();
  eval->add_option("--data", eval_paths, "Record files")->required();
  add_flag_env(eval, "--rgb-dim", eval_rgb, "Schema rgb feature length");
  add_flag_env(eval, "--audio-dim", eval_audio, "Schema audio feature length");

  // --- gradcheck ---
  auto* grad = app.add_subcommand(
      "gradcheck", "Finite-difference check of every parameter group");
  std::uint64_t grad_seed = 1;
  double grad_tol = 1e-5;
  add_flag_env(grad, "--seed", grad_seed, "Seed");
  add_flag_env(grad, "--tolerance", grad_tol, "Relative error tolerance");

  // --- gating-analyze ---
  auto* gating = app.add_subcommand(
      "gating-analyze", "Closed-form vs Monte-Carlo gate-chain analysis");
  double p_min = 0.1, p_max = 0.9;
  std::size_t grid = 9, trials = 100000;
  std::uint64_t gating_seed = 1;
  std::vector<double> betas = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::string csv_path;
  add_flag_env(gating, "--p-min", p_min, "Grid lower bound");
  add_flag_env(gating, "--p-max", p_max, "Grid upper bound");
  add_flag_env(gating, "--grid", grid, "Grid points per axis");
  gating->add_option("--beta", betas, "Injection probabilities");
  add_flag_env(gating, "--trials", trials, "Monte-Carlo trials per cell");
  add_flag_env(gating, "--seed", gating_seed, "Seed");
  add_flag_env(gating, "--csv", csv_path, "CSV output path (default stdout)");

  // --- make-synthetic ---
  auto* synth = app.add_subcommand("make-synthetic",
                                   "Generate a synthetic record file");
  vtag::SyntheticTaskSpec spec;
  std::size_t count = 5000;
  std::size_t start = 0;
  std::string out_path = "synthetic.tfrecord";
  add_flag_env(synth, "--vocab", spec.vocab, "Label vocabulary size");
  add_flag_env(synth, "--feat-dim", spec.feat_dim, "Feature width");
  add_flag_env(synth, "--mean-tags", spec.mean_tags, "Mean tags per video");
  add_flag_env(synth, "--max-tags", spec.max_tags, "Tag count cap");
  add_flag_env(synth, "--noise", spec.noise, "Feature noise stddev");
  add_flag_env(synth, "--seed", spec.seed, "Generator seed");
  add_flag_env(synth, "--count", count, "Number of examples");
  add_flag_env(synth, "--start", start,
               "First example index (splits share a seed via ranges)");
  add_flag_env(synth, "--out", out_path, "Output record file");

  // --- inspect-tfrecord ---
  auto* inspect = app.add_subcommand("inspect-tfrecord",
                                     "Validate and summarize a record file");
  std::string inspect_path;
  bool inspect_parse = false;
  std::size_t inspect_rgb = 1024, inspect_audio = 128, inspect_limit = 10;
  inspect->add_option("path", inspect_path, "Record file")->required();
  inspect->add_flag("--parse", inspect_parse, "Also parse the examples");
  add_flag_env(inspect, "--rgb-dim", inspect_rgb, "Schema rgb feature length");
  add_flag_env(inspect, "--audio-dim", inspect_audio,
               "Schema audio feature length");
  add_flag_env(inspect, "--limit", inspect_limit, "Examples to print");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed())
      return cmd_train(config, train_paths, val_paths, rgb_dim, audio_dim,
                       run_dir);
    if (eval->parsed())
      return cmd_eval(checkpoint, eval_paths, eval_rgb, eval_audio);
    if (grad->parsed()) return cmd_gradcheck(grad_seed, grad_tol);
    if (gating->parsed())
      return cmd_gating(p_min, p_max, grid, betas, trials, gating_seed,
                        csv_path);
    if (synth->parsed())
      return cmd_make_synthetic(spec, count, start, out_path);
    if (inspect->parsed())
      return cmd_inspect(inspect_path, inspect_parse, inspect_rgb,
                         inspect_audio, inspect_limit);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
