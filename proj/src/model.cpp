#include "ivgnn/model.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace ivgnn {

using nn::IntervalVar;
using nn::Tape;
using nn::Tensor;
using nn::Var;

ReadoutMode parse_readout(std::string_view name) {
  if (name == "sum") return ReadoutMode::Sum;
  if (name == "avg" || name == "average") return ReadoutMode::Average;
  throw std::invalid_argument("unknown readout '" + std::string(name) + "' (expected sum or avg)");
}

std::string_view to_string(ReadoutMode mode) { return mode == ReadoutMode::Sum ? "sum" : "avg"; }

EpsilonMode parse_epsilon(std::string_view text) {
  if (text == "learnable") return {true, 0.0};
  constexpr std::string_view prefix = "fixed:";
  if (text.substr(0, prefix.size()) == prefix) {
    const std::string num(text.substr(prefix.size()));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == num.size() && !num.empty() && std::isfinite(v)) return {false, v};
  }
  throw std::invalid_argument("bad epsilon '" + std::string(text) +
                              "' (expected fixed:<value> or learnable)");
}

std::string to_string(const EpsilonMode& eps) {
  if (eps.learnable) return "learnable";
  std::ostringstream os;
  os << "fixed:" << eps.value;
  return os.str();
}

void ModelConfig::validate() const {
  if (num_layers < 1) throw std::invalid_argument("model: num_layers must be >= 1");
  if (mlp_layers < 1) throw std::invalid_argument("model: mlp_layers must be >= 1");
  if (hidden_dim < 1) throw std::invalid_argument("model: hidden_dim must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("model: dropout must be in [0,1)");
  if (input_dim < 1) throw std::invalid_argument("model: input_dim must be >= 1");
  if (num_classes < 2) throw std::invalid_argument("model: num_classes must be >= 2");
}

std::size_t input_dim_for(const Dataset& ds, bool tag_channels) {
  return ds.feature_dim + (tag_channels ? static_cast<std::size_t>(ds.tag_vocabulary_size) : 0);
}

GraphInput make_graph_input(const Dataset& ds, const Graph& g, bool tag_channels) {
  const std::size_t n = g.num_nodes();
  const std::size_t d = input_dim_for(ds, tag_channels);
  GraphInput in;
  in.adjacency = g.adjacency;
  in.label = g.label;
  in.lo = Tensor({n, d});
  in.hi = Tensor({n, d});
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t f = 0; f < ds.feature_dim; ++f) {
      const UnitInterval u = normalized_feature(ds, g, v, f);
      in.lo.at(v, f) = u.lo;
      in.hi.at(v, f) = u.hi;
    }
    if (tag_channels) {
      const std::size_t c = ds.feature_dim + static_cast<std::size_t>(g.node_tags[v]);
      if (c >= d) throw std::invalid_argument("make_graph_input: tag outside vocabulary");
      in.lo.at(v, c) = 1.0;
      in.hi.at(v, c) = 1.0;
    }
  }
  return in;
}

IvGnnModel::IvGnnModel(ModelConfig config, std::uint64_t seed) : config_(std::move(config)) {
  config_.validate();
  std::mt19937_64 rng(seed);
  auto uniform_tensor = [&](Tensor::Shape shape, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> u(-bound, bound);
    Tensor t(std::move(shape));
    for (auto& v : t.values()) v = u(rng);
    return t;
  };

  const std::size_t h = config_.hidden_dim;
  std::size_t width = config_.input_dim;
  for (std::size_t k = 1; k <= config_.num_layers; ++k) {
    LayerIndex li;
    std::vector<nn::BatchNormState> bns;
    std::size_t in = 2 * width;
    for (std::size_t l = 0; l < config_.mlp_layers; ++l) {
      const bool last = l + 1 == config_.mlp_layers;
      const std::size_t out = last ? 2 * h : h;
      const std::string prefix = "layer" + std::to_string(k) + ".mlp" + std::to_string(l);
      li.linear_w.push_back(add_param(prefix + ".weight", uniform_tensor({in, out}, in)));
      li.linear_b.push_back(add_param(prefix + ".bias", uniform_tensor({out}, in)));
      if (!last) {
        li.bn_gamma.push_back(add_param(prefix + ".bn.gamma", Tensor({out}, 1.0)));
        li.bn_beta.push_back(add_param(prefix + ".bn.beta", Tensor({out}, 0.0)));
        bns.push_back(nn::BatchNormState::make(out));
      }
      in = out;
    }
    if (config_.epsilon.learnable) {
      li.eps = add_param("layer" + std::to_string(k) + ".eps", Tensor::scalar(config_.epsilon.value));
    }
    layers_.push_back(std::move(li));
    bn_states_.push_back(std::move(bns));
    width = h;
  }
  const std::size_t r = readout_dim();
  classifier_w_ = add_param("classifier.weight", uniform_tensor({r, config_.num_classes}, r));
  classifier_b_ = add_param("classifier.bias", uniform_tensor({config_.num_classes}, r));
}

std::size_t IvGnnModel::add_param(std::string name, Tensor value) {
  params_.push_back({std::move(name), std::move(value)});
  return params_.size() - 1;
}

std::size_t IvGnnModel::readout_dim() const {
  return 2 * config_.input_dim + config_.num_layers * 2 * config_.hidden_dim;
}

std::size_t IvGnnModel::parameter_floats() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

IvGnnModel::Batch IvGnnModel::make_batch(std::span<const GraphInput* const> graphs) const {
  Batch b;
  b.num_graphs = graphs.size();
  std::size_t total = 0;
  for (const GraphInput* g : graphs) {
    if (g->lo.rank() != 2 || g->lo.cols() != config_.input_dim || !g->lo.same_shape(g->hi) ||
        g->lo.rows() != g->num_nodes()) {
      throw std::invalid_argument("model: graph input has " + nn::shape_string(g->lo.shape()) +
                                  " features, expected [n x " + std::to_string(config_.input_dim) + "]");
    }
    total += g->num_nodes();
  }
  const std::size_t d = config_.input_dim;
  b.lo = Tensor({total, d});
  b.hi = Tensor({total, d});
  std::size_t offset = 0;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const GraphInput& g = *graphs[gi];
    const std::size_t n = g.num_nodes();
    for (std::size_t i = 0; i < n * d; ++i) {
      const double lo = g.lo[i], hi = g.hi[i];
      if (!is_valid(UnitInterval{lo, hi})) {
        throw std::invalid_argument("model: input interval outside U");
      }
      b.lo[offset * d + i] = lo;
      b.hi[offset * d + i] = hi;
    }
    for (std::size_t v = 0; v < n; ++v) {
      const auto row = static_cast<std::uint32_t>(offset + v);
      std::vector<nn::RowRef> group;
      for (auto u : g.adjacency[v]) group.push_back({0, static_cast<std::uint32_t>(offset + u)});
      if (group.empty()) group.push_back({0, row});
      b.neighbor_groups.push_back(std::move(group));
      b.self_groups.push_back({{0, row}, {1, row}});
      b.graph_of_node.push_back(gi);
    }
    b.nodes_per_graph.push_back(n);
    b.labels.push_back(g.label);
    offset += n;
  }
  return b;
}

void IvGnnModel::check_intervals(const Tape& tape, const IntervalVar& s) {
  if (!config_.check_intervals) return;
  const Tensor& lo = tape.value(s.lo);
  const Tensor& hi = tape.value(s.hi);
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] >= 0.0 && lo[i] <= hi[i] && hi[i] <= 1.0)) {
      throw IntervalInvariantError("hidden state left U: [" + std::to_string(lo[i]) + ", " +
                                   std::to_string(hi[i]) + "]");
    }
  }
  ++interval_checks_;
}

IntervalVar IvGnnModel::layer_forward(Tape& tape, std::size_t k, const Batch& batch,
                                      IntervalVar states, const std::vector<Var>& params,
                                      bool train, IntervalVar* neighbor_aggregate) {
  const LayerIndex& li = layers_.at(k - 1);

  IntervalVar self = states;
  if (config_.epsilon.learnable) {
    const Var eps = params[li.eps];
    self = nn::order_and_clamp(tape, nn::scale_one_plus(tape, states.lo, eps),
                               nn::scale_one_plus(tape, states.hi, eps));
  } else if (config_.epsilon.value != 0.0) {
    const double s = 1.0 + config_.epsilon.value;
    self = nn::order_and_clamp(tape, nn::scale(tape, states.lo, s), nn::scale(tape, states.hi, s));
  }

  const IntervalVar neighbors =
      nn::interval_meet_aggregate(tape, config_.aggregator, {states}, batch.neighbor_groups);
  if (neighbor_aggregate) *neighbor_aggregate = neighbors;
  const IntervalVar combined =
      nn::interval_meet_aggregate(tape, config_.aggregator, {self, neighbors}, batch.self_groups);

  Var x = nn::concat_cols(tape, {combined.lo, combined.hi});
  for (std::size_t l = 0; l < config_.mlp_layers; ++l) {
    x = nn::linear(tape, x, params[li.linear_w[l]], params[li.linear_b[l]]);
    if (l + 1 < config_.mlp_layers) {
      x = nn::batch_norm(tape, x, params[li.bn_gamma[l]], params[li.bn_beta[l]],
                         bn_states_[k - 1][l], train);
      x = nn::relu(tape, x);
    }
  }
  const IntervalVar out = nn::min_max_pair(tape, nn::sigmoid(tape, x));
  check_intervals(tape, out);
  return out;
}

Var IvGnnModel::readout(Tape& tape, const Batch& batch, const std::vector<IntervalVar>& states) const {
  std::vector<double> inv_nodes;
  if (config_.readout == ReadoutMode::Average) {
    for (auto n : batch.nodes_per_graph) inv_nodes.push_back(n ? 1.0 / static_cast<double>(n) : 0.0);
  }
  std::vector<Var> pooled;
  for (const auto& s : states) {
    Var p = nn::segment_sum(tape, nn::concat_cols(tape, {s.lo, s.hi}), batch.graph_of_node,
                            batch.num_graphs);
    if (config_.readout == ReadoutMode::Average) p = nn::row_scale(tape, p, inv_nodes);
    pooled.push_back(p);
  }
  return nn::concat_cols(tape, pooled);
}

IvGnnModel::Forward IvGnnModel::forward(Tape& tape, const Batch& batch, bool train,
                                        std::mt19937_64* dropout_rng) {
  Forward f;
  for (const auto& p : params_) f.params.push_back(tape.parameter(p.value));
  IntervalVar s{tape.constant(batch.lo), tape.constant(batch.hi)};
  f.states.push_back(s);
  for (std::size_t k = 1; k <= config_.num_layers; ++k) {
    IntervalVar agg;
    s = layer_forward(tape, k, batch, s, f.params, train, &agg);
    f.aggregates.push_back(agg);
    f.states.push_back(s);
  }
  f.readout = readout(tape, batch, f.states);
  Var h = f.readout;
  if (train && config_.dropout > 0.0) {
    if (!dropout_rng) throw std::invalid_argument("model: dropout rng required in train mode");
    h = nn::dropout(tape, h, config_.dropout, *dropout_rng, true);
  }
  f.logits = nn::linear(tape, h, f.params[classifier_w_], f.params[classifier_b_]);
  if (train) train_forward_graphs_ += batch.num_graphs;
  return f;
}

Tensor IvGnnModel::predict_logits(std::span<const GraphInput* const> graphs) {
  Tape tape;
  const Batch batch = make_batch(graphs);
  const Forward f = forward(tape, batch, false);
  return tape.value(f.logits);
}

std::vector<int> IvGnnModel::predict(std::span<const GraphInput* const> graphs) {
  const Tensor logits = predict_logits(graphs);
  std::vector<int> out;
  const std::size_t c = logits.cols();
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < c; ++j)
      if (logits.at(r, j) > logits.at(r, best)) best = j;
    out.push_back(static_cast<int>(best));
  }
  return out;
}

std::vector<nn::NamedTensor> IvGnnModel::state_dict() const {
  std::vector<nn::NamedTensor> out;
  for (const auto& p : params_) out.push_back({p.name, p.value});
  for (std::size_t k = 0; k < bn_states_.size(); ++k) {
    for (std::size_t l = 0; l < bn_states_[k].size(); ++l) {
      const std::string prefix = "layer" + std::to_string(k + 1) + ".mlp" + std::to_string(l) + ".bn";
      out.push_back({prefix + ".running_mean", bn_states_[k][l].running_mean});
      out.push_back({prefix + ".running_var", bn_states_[k][l].running_var});
    }
  }
  return out;
}

void IvGnnModel::load_state_dict(const std::vector<nn::NamedTensor>& tensors) {
  std::map<std::string, const Tensor*> by_name;
  for (const auto& t : tensors) by_name[t.name] = &t.value;
  auto take = [&](const std::string& name, Tensor& dst) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw std::runtime_error("checkpoint: missing tensor " + name);
    if (!it->second->same_shape(dst)) throw std::runtime_error("checkpoint: shape mismatch for " + name);
    dst = *it->second;
  };
  for (auto& p : params_) take(p.name, p.value);
  for (std::size_t k = 0; k < bn_states_.size(); ++k) {
    for (std::size_t l = 0; l < bn_states_[k].size(); ++l) {
      const std::string prefix = "layer" + std::to_string(k + 1) + ".mlp" + std::to_string(l) + ".bn";
      take(prefix + ".running_mean", bn_states_[k][l].running_mean);
      take(prefix + ".running_var", bn_states_[k][l].running_var);
    }
  }
}

}  // namespace ivgnn
