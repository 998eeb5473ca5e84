#pragma once

// IV-GNN: K interval message-passing layers
//
//   h_v^k = MLP^k( agr( (1 + eps^k) h_v^{k-1}, agr{ h_u^{k-1} : u in N(v) } ) )
//
// followed by a concat-of-sums readout over layers 0..K and a linear head.
// Interval states are carried as paired lo/hi channels. After each MLP the
// 2H outputs are squashed by the logistic function and re-paired as
// lo = min(a_j, b_j), hi = max(a_j, b_j), so every state stays inside U.

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ivgnn/graph.hpp"
#include "ivgnn/interval.hpp"
#include "ivgnn/nn/checkpoint.hpp"
#include "ivgnn/nn/ops.hpp"
#include "ivgnn/nn/tape.hpp"

namespace ivgnn {

enum class ReadoutMode { Sum, Average };
ReadoutMode parse_readout(std::string_view name);
std::string_view to_string(ReadoutMode mode);

struct EpsilonMode {
  bool learnable = false;
  double value = 0.0;  // fixed value, or the initial value when learnable
};
/// Accepts "fixed:<v>" and "learnable".
EpsilonMode parse_epsilon(std::string_view text);
std::string to_string(const EpsilonMode& eps);

struct ModelConfig {
  std::size_t num_layers = 5;
  std::size_t mlp_layers = 2;
  std::size_t hidden_dim = 32;
  EpsilonMode epsilon{};
  Aggregator aggregator = Aggregator::AgrNew;
  double dropout = 0.5;
  ReadoutMode readout = ReadoutMode::Sum;
  std::size_t input_dim = 0;  // interval coordinates of the layer-0 states
  std::size_t num_classes = 2;
  bool check_intervals = true;

  void validate() const;
};

/// Layer-0 states of one graph, already inside U.
struct GraphInput {
  Adjacency adjacency;
  nn::Tensor lo;  // [n x input_dim]
  nn::Tensor hi;
  int label = 0;

  std::size_t num_nodes() const { return adjacency.size(); }
};

/// Interval coordinates produced by make_graph_input: normalized features
/// followed, when `tag_channels` is set, by a one-hot tag block encoded as
/// degenerate intervals.
std::size_t input_dim_for(const Dataset& ds, bool tag_channels = true);
/// Requires ds.norm_stats (see fit_normalization) when ds has features.
GraphInput make_graph_input(const Dataset& ds, const Graph& g, bool tag_channels = true);

class IntervalInvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Parameter {
  std::string name;
  nn::Tensor value;
};

class IvGnnModel {
 public:
  IvGnnModel(ModelConfig config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  std::vector<Parameter>& parameters() { return params_; }
  const std::vector<Parameter>& parameters() const { return params_; }
  std::size_t parameter_floats() const;

  /// Stacked batch: all nodes of all graphs as rows.
  struct Batch {
    std::size_t num_graphs = 0;
    std::vector<std::size_t> graph_of_node;
    std::vector<std::size_t> nodes_per_graph;
    std::vector<std::vector<nn::RowRef>> neighbor_groups;  // isolated node -> itself
    std::vector<std::vector<nn::RowRef>> self_groups;      // (scaled self, neighbor aggregate)
    nn::Tensor lo, hi;
    std::vector<int> labels;
  };
  Batch make_batch(std::span<const GraphInput* const> graphs) const;

  struct Forward {
    nn::Var logits;
    nn::Var readout;
    std::vector<nn::Var> params;             // aligned with parameters()
    std::vector<nn::IntervalVar> states;     // layers 0..K
    std::vector<nn::IntervalVar> aggregates; // neighbor aggregate per layer 1..K
  };

  /// Records the full forward pass. Batch-norm running statistics are
  /// updated only when `train` is set. `dropout_rng` is required in train
  /// mode when dropout > 0.
  Forward forward(nn::Tape& tape, const Batch& batch, bool train,
                  std::mt19937_64* dropout_rng = nullptr);

  /// One message-passing layer (1-based k) on already bound parameters.
  nn::IntervalVar layer_forward(nn::Tape& tape, std::size_t k, const Batch& batch,
                                nn::IntervalVar states, const std::vector<nn::Var>& params,
                                bool train, nn::IntervalVar* neighbor_aggregate = nullptr);

  /// Concat over layers of the per-graph endpoint sums (or averages).
  nn::Var readout(nn::Tape& tape, const Batch& batch,
                  const std::vector<nn::IntervalVar>& states) const;

  /// Eval-mode logits, [graphs x classes].
  nn::Tensor predict_logits(std::span<const GraphInput* const> graphs);
  std::vector<int> predict(std::span<const GraphInput* const> graphs);

  /// Parameters plus batch-norm running statistics.
  std::vector<nn::NamedTensor> state_dict() const;
  void load_state_dict(const std::vector<nn::NamedTensor>& tensors);

  /// Number of interval-validity checks that ran (all passed, otherwise
  /// IntervalInvariantError was thrown).
  std::size_t interval_checks() const { return interval_checks_; }
  /// Graphs that went through a training-mode forward pass.
  std::size_t train_forward_graphs() const { return train_forward_graphs_; }

  std::size_t readout_dim() const;

 private:
  struct LayerIndex {
    std::vector<std::size_t> linear_w, linear_b;  // per MLP linear layer
    std::vector<std::size_t> bn_gamma, bn_beta;   // per hidden layer
    std::size_t eps = 0;
  };

  std::size_t add_param(std::string name, nn::Tensor value);
  void check_intervals(const nn::Tape& tape, const nn::IntervalVar& s);

  ModelConfig config_;
  std::vector<Parameter> params_;
  std::vector<LayerIndex> layers_;
  std::vector<std::vector<nn::BatchNormState>> bn_states_;
  std::size_t classifier_w_ = 0, classifier_b_ = 0;
  std::size_t interval_checks_ = 0;
  std::size_t train_forward_graphs_ = 0;
};

}  // namespace ivgnn
