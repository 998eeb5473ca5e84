#pragma once

// Training loop, stratified cross-validation, aggregator comparison and the
// per-epoch complexity benchmark.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ivgnn/graph.hpp"
#include "ivgnn/model.hpp"

namespace ivgnn {

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 16;
  double base_lr = 0.01;
  std::size_t lr_step_epochs = 50;
  double lr_decay = 0.5;
  std::uint64_t seed = 0;
  std::size_t repeats = 1;
  std::size_t folds = 10;
  std::size_t jobs = 1;
  bool tag_channels = true;

  void validate() const;
  /// 350 epochs and 10 repeats.
  static TrainConfig full_protocol(std::uint64_t seed);
};

struct FoldReport {
  std::size_t fold = 0;
  std::size_t repeat = 0;
  std::vector<double> train_acc;  // per epoch
  std::vector<double> test_acc;   // per epoch
  std::size_t best_epoch = 0;     // 0-based
  double best_test_acc = 0.0;
  double final_train_acc = 0.0;
  std::vector<double> epoch_loss;
  // Instrumentation: test graphs that reached normalization fitting or a
  // training-mode forward pass. Always 0 for a correct protocol.
  std::size_t leaked_test_graphs = 0;
  std::size_t interval_checks = 0;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Seed of the stratified split used by cross_validate for `repeat`.
std::uint64_t split_seed(std::uint64_t seed, std::size_t repeat);

/// Fills input_dim and num_classes of `model_cfg` from the dataset.
ModelConfig resolve_model_config(ModelConfig model_cfg, const Dataset& ds, bool tag_channels);

/// Trains one fold from scratch. Normalization is fit on the fold's training
/// graphs only. Deterministic given (train_cfg.seed, repeat, fold). When
/// `trained` is non-null the final model is moved there.
FoldReport train_fold(const Dataset& ds, const FoldSplit& split, std::size_t fold,
                      const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                      std::size_t repeat = 0, std::unique_ptr<IvGnnModel>* trained = nullptr);

struct VariantSummary {
  Aggregator variant = Aggregator::AgrNew;
  /// Epoch maximizing test accuracy averaged over all folds and repeats.
  std::size_t best_epoch = 0;
  /// Mean and population std over fold x repeat test accuracies at best_epoch.
  double mean = 0.0;
  double std = 0.0;
  std::vector<double> mean_train_curve;
  std::vector<double> mean_test_curve;
  /// best_epoch / best_test_acc of each report are re-anchored to the shared
  /// best epoch, so `mean` is the arithmetic mean of the reports' bests.
  std::vector<FoldReport> folds;
};

struct ExperimentSummary {
  std::string dataset;
  std::vector<VariantSummary> rows;
};

using ProgressFn = std::function<void(const std::string&)>;

VariantSummary cross_validate(const Dataset& ds, const ModelConfig& model_cfg,
                              const TrainConfig& train_cfg, const ProgressFn& progress = {});

/// cross_validate once per aggregator with identical splits, initial
/// parameters and batch orders.
ExperimentSummary compare_aggregators(const Dataset& ds, const ModelConfig& model_cfg,
                                      const TrainConfig& train_cfg,
                                      const ProgressFn& progress = {});

/// Columns: dataset,variant,fold,repeat,best_epoch,best_test_acc,final_train_acc
void write_results_csv(std::ostream& out, const ExperimentSummary& summary);
/// Columns: epoch,mean_train_acc,mean_test_acc
void write_curves_csv(std::ostream& out, const VariantSummary& row);
/// Columns: dataset,variant,mean,std,best_epoch
void write_summary_csv(std::ostream& out, const ExperimentSummary& summary);
/// Minimal SVG line chart of the mean train curves, one line per variant.
void write_curves_svg(std::ostream& out, const ExperimentSummary& summary);

struct BenchRow {
  std::size_t num_nodes = 0;
  std::size_t hidden_dim = 0;
  std::size_t num_layers = 0;
  std::size_t num_edges = 0;
  double seconds_per_epoch = 0.0;
  std::size_t parameter_floats = 0;
  std::size_t activation_floats = 0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit fit_line(std::span<const double> xs, std::span<const double> ys);

/// Times one training epoch (forward, backward, Adam) over random graphs of
/// `sizes[i]` total nodes for every hidden dimension. Each timing is the
/// median of `trials` measurements.
std::vector<BenchRow> complexity_bench(std::span<const std::size_t> sizes,
                                       std::span<const std::size_t> hidden_dims,
                                       std::size_t num_layers = 5, std::uint64_t seed = 0,
                                       std::size_t trials = 5);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace ivgnn
