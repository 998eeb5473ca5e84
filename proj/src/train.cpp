#include "ivgnn/train.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include "ivgnn/nn/optim.hpp"
#include "ivgnn/synth.hpp"

namespace ivgnn {
namespace {

std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent stream per (seed, repeat, fold, purpose).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t repeat, std::uint64_t fold,
                          std::uint64_t purpose) {
  return mix(mix(mix(mix(seed) ^ repeat) ^ (fold + 0x100)) ^ (purpose + 0x10000));
}

enum Purpose : std::uint64_t { kInit = 1, kOrder = 2, kDropout = 3, kSplit = 4 };

double accuracy(IvGnnModel& model, const std::vector<const GraphInput*>& graphs) {
  if (graphs.empty()) return 0.0;
  constexpr std::size_t kChunk = 64;
  std::size_t correct = 0;
  for (std::size_t s = 0; s < graphs.size(); s += kChunk) {
    const std::size_t e = std::min(graphs.size(), s + kChunk);
    const std::span<const GraphInput* const> chunk(graphs.data() + s, e - s);
    const auto pred = model.predict(chunk);
    for (std::size_t i = 0; i < pred.size(); ++i)
      if (pred[i] == chunk[i]->label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(graphs.size());
}

// One pass of mini-batch Adam over `order`; returns the summed loss.
double train_epoch(IvGnnModel& model, const std::vector<const GraphInput*>& order,
                   std::size_t batch_size, nn::AdamState& adam, double lr,
                   std::mt19937_64& dropout_rng, std::size_t* activation_floats = nullptr) {
  double total = 0.0;
  std::vector<nn::Tensor*> param_ptrs;
  for (auto& p : model.parameters()) param_ptrs.push_back(&p.value);
  for (std::size_t s = 0; s < order.size(); s += batch_size) {
    const std::size_t e = std::min(order.size(), s + batch_size);
    const std::span<const GraphInput* const> graphs(order.data() + s, e - s);
    nn::Tape tape;
    const auto batch = model.make_batch(graphs);
    const auto f = model.forward(tape, batch, true, &dropout_rng);
    const nn::Var loss = nn::softmax_cross_entropy(tape, f.logits, batch.labels);
    tape.backward(loss);
    total += tape.value(loss)[0];
    std::vector<nn::Tensor> grads;
    grads.reserve(f.params.size());
    for (nn::Var p : f.params) grads.push_back(tape.grad(p));
    nn::adam_step(param_ptrs, grads, adam, lr);
    if (activation_floats) *activation_floats = std::max(*activation_floats, tape.activation_floats());
  }
  return total;
}

template <class Fn>
void run_parallel(std::size_t count, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("train: batch size must be >= 1");
  if (!(base_lr > 0.0)) throw std::invalid_argument("train: learning rate must be positive");
  if (repeats < 1) throw std::invalid_argument("train: repeats must be >= 1");
  if (folds < 2) throw std::invalid_argument("train: folds must be >= 2");
  if (lr_step_epochs < 1) throw std::invalid_argument("train: lr step must be >= 1");
}

TrainConfig TrainConfig::full_protocol(std::uint64_t seed) {
  TrainConfig c;
  c.epochs = 350;
  c.repeats = 10;
  c.seed = seed;
  return c;
}

std::uint64_t split_seed(std::uint64_t seed, std::size_t repeat) {
  return derive_seed(seed, repeat, 0, kSplit);
}

ModelConfig resolve_model_config(ModelConfig cfg, const Dataset& ds, bool tag_channels) {
  cfg.input_dim = input_dim_for(ds, tag_channels);
  cfg.num_classes = static_cast<std::size_t>(std::max(2, ds.num_classes));
  return cfg;
}

FoldReport train_fold(const Dataset& ds, const FoldSplit& split, std::size_t fold,
                      const ModelConfig& model_cfg, const TrainConfig& cfg, std::size_t repeat,
                      std::unique_ptr<IvGnnModel>* trained) {
  cfg.validate();
  if (fold >= split.train.size() || fold >= split.test.size()) {
    throw std::invalid_argument("train_fold: fold index out of range");
  }
  const auto& train_idx = split.train[fold];
  const auto& test_idx = split.test[fold];

  std::vector<char> touched(ds.size(), 0);  // graphs that influenced training
  const Dataset normed = ds.feature_dim > 0 ? fit_normalization(ds, train_idx) : ds;
  for (auto i : train_idx) touched[i] = 1;

  std::vector<GraphInput> inputs(ds.size());
  std::vector<const GraphInput*> train_set, test_set;
  for (auto i : train_idx) {
    inputs[i] = make_graph_input(normed, normed.graphs[i], cfg.tag_channels);
    train_set.push_back(&inputs[i]);
  }
  for (auto i : test_idx) {
    inputs[i] = make_graph_input(normed, normed.graphs[i], cfg.tag_channels);
    test_set.push_back(&inputs[i]);
  }

  const ModelConfig mc = resolve_model_config(model_cfg, ds, cfg.tag_channels);
  auto model = std::make_unique<IvGnnModel>(mc, derive_seed(cfg.seed, repeat, fold, kInit));
  std::mt19937_64 order_rng(derive_seed(cfg.seed, repeat, fold, kOrder));
  std::mt19937_64 dropout_rng(derive_seed(cfg.seed, repeat, fold, kDropout));
  nn::AdamState adam;

  FoldReport report;
  report.fold = fold;
  report.repeat = repeat;
  std::vector<std::size_t> order(train_idx.begin(), train_idx.end());
  std::vector<const GraphInput*> batch_order;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = nn::lr_schedule(epoch, cfg.base_lr, cfg.lr_step_epochs, cfg.lr_decay);
    std::shuffle(order.begin(), order.end(), order_rng);
    batch_order.clear();
    for (auto i : order) {
      touched[i] = 1;
      batch_order.push_back(&inputs[i]);
    }
    double loss = 0.0;
    try {
      loss = train_epoch(*model, batch_order, cfg.batch_size, adam, lr, dropout_rng);
    } catch (const nn::NumericError& e) {
      throw TrainingDiverged("fold " + std::to_string(fold) + " repeat " + std::to_string(repeat) +
                             " epoch " + std::to_string(epoch) + ": " + e.what());
    }
    report.epoch_loss.push_back(loss);
    report.train_acc.push_back(accuracy(*model, train_set));
    report.test_acc.push_back(accuracy(*model, test_set));
  }
  const auto best = std::max_element(report.test_acc.begin(), report.test_acc.end());
  report.best_epoch = static_cast<std::size_t>(best - report.test_acc.begin());
  report.best_test_acc = *best;
  report.final_train_acc = report.train_acc.back();
  for (auto i : test_idx) report.leaked_test_graphs += touched[i] ? 1 : 0;
  report.interval_checks = model->interval_checks();
  if (trained) *trained = std::move(model);
  return report;
}

VariantSummary cross_validate(const Dataset& ds, const ModelConfig& model_cfg,
                              const TrainConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  std::vector<FoldSplit> splits;
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    splits.push_back(stratified_kfold(ds, cfg.folds, split_seed(cfg.seed, r)));
  }
  const std::size_t total = cfg.repeats * cfg.folds;
  std::vector<FoldReport> reports(total);
  std::mutex progress_mutex;
  run_parallel(total, cfg.jobs, [&](std::size_t job) {
    const std::size_t r = job / cfg.folds, f = job % cfg.folds;
    reports[job] = train_fold(ds, splits[r], f, model_cfg, cfg, r);
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(std::string(to_string(model_cfg.aggregator)) + " repeat " + std::to_string(r) +
               " fold " + std::to_string(f) + " best " + std::to_string(reports[job].best_test_acc));
    }
  });

  VariantSummary s;
  s.variant = model_cfg.aggregator;
  s.mean_train_curve.assign(cfg.epochs, 0.0);
  s.mean_test_curve.assign(cfg.epochs, 0.0);
  for (const auto& rep : reports) {
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
      s.mean_train_curve[e] += rep.train_acc[e] / static_cast<double>(total);
      s.mean_test_curve[e] += rep.test_acc[e] / static_cast<double>(total);
    }
  }
  s.best_epoch = static_cast<std::size_t>(
      std::max_element(s.mean_test_curve.begin(), s.mean_test_curve.end()) - s.mean_test_curve.begin());
  double mean = 0.0;
  for (auto& rep : reports) {
    rep.best_epoch = s.best_epoch;
    rep.best_test_acc = rep.test_acc[s.best_epoch];
    mean += rep.best_test_acc;
  }
  mean /= static_cast<double>(total);
  double var = 0.0;
  for (const auto& rep : reports) var += (rep.best_test_acc - mean) * (rep.best_test_acc - mean);
  s.mean = mean;
  s.std = std::sqrt(var / static_cast<double>(total));
  s.folds = std::move(reports);
  return s;
}

ExperimentSummary compare_aggregators(const Dataset& ds, const ModelConfig& model_cfg,
                                      const TrainConfig& cfg, const ProgressFn& progress) {
  ExperimentSummary out;
  out.dataset = ds.name;
  for (Aggregator v : kAllAggregators) {
    ModelConfig mc = model_cfg;
    mc.aggregator = v;
    out.rows.push_back(cross_validate(ds, mc, cfg, progress));
  }
  return out;
}

void write_results_csv(std::ostream& out, const ExperimentSummary& summary) {
  out << "dataset,variant,fold,repeat,best_epoch,best_test_acc,final_train_acc\n";
  out << std::setprecision(10);
  for (const auto& row : summary.rows) {
    for (const auto& f : row.folds) {
      out << summary.dataset << ',' << to_string(row.variant) << ',' << f.fold << ',' << f.repeat
          << ',' << f.best_epoch << ',' << f.best_test_acc << ',' << f.final_train_acc << '\n';
    }
  }
}

void write_curves_csv(std::ostream& out, const VariantSummary& row) {
  out << "epoch,mean_train_acc,mean_test_acc\n" << std::setprecision(10);
  for (std::size_t e = 0; e < row.mean_train_curve.size(); ++e) {
    out << e << ',' << row.mean_train_curve[e] << ',' << row.mean_test_curve[e] << '\n';
  }
}

void write_summary_csv(std::ostream& out, const ExperimentSummary& summary) {
  out << "dataset,variant,mean,std,best_epoch\n" << std::setprecision(10);
  for (const auto& row : summary.rows) {
    out << summary.dataset << ',' << to_string(row.variant) << ',' << row.mean << ',' << row.std
        << ',' << row.best_epoch << '\n';
  }
}

void write_curves_svg(std::ostream& out, const ExperimentSummary& summary) {
  constexpr double kW = 640, kH = 400, kPad = 40;
  static constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<line x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\"" << kW - kPad << "\" y2=\""
      << kH - kPad << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad << "\" y2=\"" << kH - kPad
      << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 8 << "\" text-anchor=\"middle\">epoch</text>\n"
      << "<text x=\"12\" y=\"" << kH / 2 << "\" transform=\"rotate(-90 12 " << kH / 2
      << ")\" text-anchor=\"middle\">train accuracy</text>\n";
  for (std::size_t i = 0; i < summary.rows.size(); ++i) {
    const auto& curve = summary.rows[i].mean_train_curve;
    if (curve.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << kColors[i % 4] << "\" points=\"";
    const double dx = curve.size() > 1 ? (kW - 2 * kPad) / static_cast<double>(curve.size() - 1) : 0.0;
    for (std::size_t e = 0; e < curve.size(); ++e) {
      out << kPad + dx * static_cast<double>(e) << ',' << (kH - kPad) - curve[e] * (kH - 2 * kPad) << ' ';
    }
    out << "\"/>\n<text x=\"" << kW - kPad - 80 << "\" y=\"" << kPad + 16 * static_cast<double>(i)
        << "\" fill=\"" << kColors[i % 4] << "\">" << to_string(summary.rows[i].variant) << "</text>\n";
  }
  out << "</svg>\n";
}

LinearFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("fit_line: need >= 2 points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  LinearFit fit;
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
    ss_res += r * r;
  }
  fit.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

std::vector<BenchRow> complexity_bench(std::span<const std::size_t> sizes,
                                       std::span<const std::size_t> hidden_dims,
                                       std::size_t num_layers, std::uint64_t seed,
                                       std::size_t trials) {
  if (!std::is_sorted(sizes.begin(), sizes.end())) {
    throw std::invalid_argument("complexity_bench: sizes must be ascending");
  }
  constexpr std::size_t kGraphNodes = 25;
  constexpr std::size_t kInputDim = 4;
  constexpr double kEdgeProb = 0.2;
  constexpr double kMinSeconds = 0.05;
  using Clock = std::chrono::steady_clock;

  std::vector<BenchRow> rows;
  for (std::size_t total : sizes) {
    std::mt19937_64 rng(derive_seed(seed, total, 0, kInit));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<GraphInput> inputs;
    std::size_t edges = 0;
    for (std::size_t made = 0; made < total;) {
      const std::size_t n = std::min(kGraphNodes, total - made);
      const Graph g = n >= 2 ? gen_er_graph(n, kEdgeProb, rng) : make_graph(n, {});
      edges += g.num_edges();
      GraphInput in;
      in.adjacency = g.adjacency;
      in.label = static_cast<int>(inputs.size() % 2);
      in.lo = nn::Tensor({n, kInputDim});
      in.hi = nn::Tensor({n, kInputDim});
      for (std::size_t i = 0; i < n * kInputDim; ++i) {
        const double a = unit(rng), b = unit(rng);
        in.lo[i] = std::min(a, b);
        in.hi[i] = std::max(a, b);
      }
      inputs.push_back(std::move(in));
      made += n;
    }
    std::vector<const GraphInput*> order;
    for (const auto& in : inputs) order.push_back(&in);

    for (std::size_t hidden : hidden_dims) {
      ModelConfig mc;
      mc.num_layers = num_layers;
      mc.hidden_dim = hidden;
      mc.input_dim = kInputDim;
      mc.num_classes = 2;
      IvGnnModel model(mc, seed);
      nn::AdamState adam;
      std::mt19937_64 drop(seed);
      BenchRow row;
      row.num_nodes = total;
      row.hidden_dim = hidden;
      row.num_layers = num_layers;
      row.num_edges = edges;
      row.parameter_floats = model.parameter_floats();
      // Warm-up epoch also records the activation footprint of a full pass.
      train_epoch(model, order, 16, adam, 0.01, drop, &row.activation_floats);
      std::vector<double> samples;
      for (std::size_t t = 0; t < std::max<std::size_t>(1, trials); ++t) {
        std::size_t epochs = 0;
        const auto start = Clock::now();
        double elapsed = 0.0;
        do {
          train_epoch(model, order, 16, adam, 0.01, drop);
          ++epochs;
          elapsed = std::chrono::duration<double>(Clock::now() - start).count();
        } while (elapsed < kMinSeconds);
        samples.push_back(elapsed / static_cast<double>(epochs));
      }
      std::nth_element(samples.begin(), samples.begin() + samples.size() / 2, samples.end());
      row.seconds_per_epoch = samples[samples.size() / 2];
      rows.push_back(row);
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "num_nodes,num_edges,hidden_dim,num_layers,seconds_per_epoch,parameter_floats,activation_floats\n"
      << std::setprecision(6);
  for (const auto& r : rows) {
    out << r.num_nodes << ',' << r.num_edges << ',' << r.hidden_dim << ',' << r.num_layers << ','
        << r.seconds_per_epoch << ',' << r.parameter_floats << ',' << r.activation_floats << '\n';
  }
}

}  // namespace ivgnn
