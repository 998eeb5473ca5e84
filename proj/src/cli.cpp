#include "ivgnn/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ivgnn/axioms.hpp"
#include "ivgnn/graph.hpp"
#include "ivgnn/model.hpp"
#include "ivgnn/nn/checkpoint.hpp"
#include "ivgnn/synth.hpp"
#include "ivgnn/train.hpp"

namespace ivgnn::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
  std::string data;
  // gen-synth
  std::string rule = "density";
  std::string name;
  std::size_t size = 200;
  std::size_t n_min = 10, n_max = 30;
  double p_min = 0.1, p_max = 0.4;
  // training
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> repeats;
  std::size_t batch = 16;
  double lr = 0.01;
  std::size_t hidden = 32;
  std::size_t layers = 5;
  std::size_t mlp_layers = 2;
  std::string aggregator = "agr_new";
  std::string epsilon = "fixed:0";
  std::string readout = "sum";
  std::string mode;
  std::size_t jobs = 1;
  std::size_t folds = 10;
  std::size_t fold = 0;
  double dropout = 0.5;
  bool full_protocol = false;
  bool no_tags = false;
  std::string plot;
  // axioms
  std::string variant = "all";
  double grid = 0.05;
  bool order = false;
  // bench
  std::vector<std::size_t> sizes{50, 100, 200, 400};
  std::vector<std::size_t> hiddens{32, 64};
  std::size_t trials = 5;
};

struct Parser {
  CLI::App app{"Interval-valued graph neural networks", "ivgnn"};
  Options o;
  std::vector<CLI::App*> subs;

  Parser() {
    app.require_subcommand(1, 1);
    app.set_help_all_flag("--help-all");

    auto add_seed = [&](CLI::App* s, bool required) {
      auto* opt = s->add_option("--seed", o.seed, "Random seed");
      if (required) opt->required();
    };
    auto add_config = [&](CLI::App* s) {
      s->add_option("--config", o.config, "key = value file; flags override it");
    };
    auto add_training = [&](CLI::App* s) {
      s->add_option("--data", o.data, "TU dataset file or directory")->required();
      s->add_option("--epochs", o.epochs, "Epochs per fold (default 100)");
      s->add_option("--repeats", o.repeats, "Cross-validation repeats (default 1)");
      s->add_option("--batch", o.batch, "Graphs per mini-batch")->check(CLI::PositiveNumber);
      s->add_option("--lr", o.lr, "Base learning rate")->check(CLI::PositiveNumber);
      s->add_option("--hidden", o.hidden, "Hidden intervals per node")->check(CLI::PositiveNumber);
      s->add_option("--layers", o.layers, "Message-passing layers K")->check(CLI::PositiveNumber);
      s->add_option("--mlp-layers", o.mlp_layers, "Linear layers per MLP")->check(CLI::PositiveNumber);
      s->add_option("--aggregator", o.aggregator, "agr_0, agr_e or agr_new")
          ->check(CLI::IsMember({"agr_0", "agr_e", "agr_new"}));
      s->add_option("--epsilon", o.epsilon, "fixed:<v> or learnable");
      s->add_option("--readout", o.readout, "sum or avg")->check(CLI::IsMember({"sum", "avg", "average"}));
      s->add_option("--mode", o.mode, "Rebuild features from tags: biased or degenerate")
          ->check(CLI::IsMember({"biased", "degenerate"}));
      s->add_option("--dropout", o.dropout, "Readout dropout")->check(CLI::Range(0.0, 0.999));
      s->add_option("--jobs", o.jobs, "Folds trained in parallel")->check(CLI::PositiveNumber);
      s->add_option("--folds", o.folds, "Cross-validation folds")->check(CLI::Range(2, 1000));
      s->add_flag("--full-protocol", o.full_protocol, "350 epochs and 10 repeats unless overridden");
      s->add_flag("--no-tags", o.no_tags, "Drop the one-hot tag channels");
      add_seed(s, true);
      add_config(s);
    };

    auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic dataset");
    gen->add_option("--rule", o.rule, "density or clustering")->check(CLI::IsMember({"density", "clustering"}));
    gen->add_option("--size", o.size, "Number of graphs")->check(CLI::PositiveNumber);
    gen->add_option("--n-min", o.n_min, "Minimum nodes per graph");
    gen->add_option("--n-max", o.n_max, "Maximum nodes per graph");
    gen->add_option("--p-min", o.p_min, "Minimum edge probability");
    gen->add_option("--p-max", o.p_max, "Maximum edge probability");
    gen->add_option("--name", o.name, "Dataset name");
    gen->add_option("--out", o.out, "Output directory")->required();
    add_seed(gen, true);
    add_config(gen);

    auto* ivl = app.add_subcommand("intervalize", "Replace node features by tag intervals");
    ivl->add_option("--data", o.data, "TU dataset file or directory")->required();
    ivl->add_option("--mode", o.mode, "biased or degenerate")
        ->check(CLI::IsMember({"biased", "degenerate"}))
        ->required();
    ivl->add_option("--name", o.name, "Dataset name");
    ivl->add_option("--out", o.out, "Output directory")->required();
    add_seed(ivl, true);
    add_config(ivl);

    auto* train = app.add_subcommand("train", "Train one cross-validation fold");
    add_training(train);
    train->add_option("--fold", o.fold, "Fold index");
    train->add_option("--out", o.out, "Checkpoint path");

    auto* cv = app.add_subcommand("cv", "Cross-validate one aggregator");
    add_training(cv);
    cv->add_option("--out", o.out, "Directory for CSV results");
    cv->add_option("--plot", o.plot, "Write an SVG of the training curves");

    auto* cmp = app.add_subcommand("compare", "Cross-validate all three aggregators");
    add_training(cmp);
    cmp->add_option("--out", o.out, "Directory for CSV results");
    cmp->add_option("--plot", o.plot, "Write an SVG of the training curves");

    auto* ax = app.add_subcommand("axioms", "Check aggregation axioms on a grid");
    ax->add_option("--variant", o.variant, "agr_0, agr_e, agr_new or all")
        ->check(CLI::IsMember({"agr_0", "agr_e", "agr_new", "all"}));
    ax->add_option("--grid", o.grid, "Grid step")->check(CLI::Range(1e-6, 0.25));
    ax->add_flag("--order", o.order, "Also check the order axioms of leq_new");
    add_config(ax);

    auto* bench = app.add_subcommand("bench", "Per-epoch time and memory scaling");
    bench->add_option("--sizes", o.sizes, "Total node counts, ascending")->delimiter(',');
    bench->add_option("--hidden", o.hiddens, "Hidden dimensions")->delimiter(',');
    bench->add_option("--layers", o.layers, "Message-passing layers K")->check(CLI::PositiveNumber);
    bench->add_option("--trials", o.trials, "Timings per cell (median reported)")->check(CLI::PositiveNumber);
    bench->add_option("--out", o.out, "CSV path");
    add_seed(bench, true);
    add_config(bench);

    auto* stats = app.add_subcommand("stats", "Print dataset statistics");
    stats->add_option("--data", o.data, "TU dataset file or directory")->required();
    add_config(stats);

    subs = {gen, ivl, train, cv, cmp, ax, bench, stats};
  }

  CLI::App* selected() const {
    for (auto* s : subs)
      if (s->parsed()) return s;
    return nullptr;
  }

  void parse(const std::vector<std::string>& args) {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  }
};

ModelConfig model_config(const Options& o) {
  ModelConfig mc;
  mc.num_layers = o.layers;
  mc.mlp_layers = o.mlp_layers;
  mc.hidden_dim = o.hidden;
  mc.epsilon = parse_epsilon(o.epsilon);
  mc.aggregator = parse_aggregator(o.aggregator);
  mc.readout = parse_readout(o.readout);
  mc.dropout = o.dropout;
  return mc;
}

TrainConfig train_config(const Options& o) {
  TrainConfig tc = o.full_protocol ? TrainConfig::full_protocol(*o.seed) : TrainConfig{};
  tc.seed = *o.seed;
  if (o.epochs) tc.epochs = *o.epochs;
  if (o.repeats) tc.repeats = *o.repeats;
  tc.batch_size = o.batch;
  tc.base_lr = o.lr;
  tc.jobs = o.jobs;
  tc.folds = o.folds;
  tc.tag_channels = !o.no_tags;
  tc.validate();
  return tc;
}

// An explicit --mode rebuilds features from tags even when a sidecar exists;
// without a sidecar the biased construction is the default.
Dataset load_training_data(const Options& o) {
  Dataset ds = load_tu_dataset(o.data);
  if (!o.mode.empty()) return intervalize_tags(std::move(ds), parse_interval_mode(o.mode), *o.seed);
  if (ds.feature_dim == 0) return intervalize_tags(std::move(ds), IntervalMode::Biased, *o.seed);
  return ds;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& fn) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  fn(f);
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

void emit_experiment(const Options& o, const ExperimentSummary& summary, std::ostream& out) {
  write_summary_csv(out, summary);
  if (!o.out.empty()) {
    const fs::path dir(o.out);
    fs::create_directories(dir);
    write_file(dir / "results.csv", [&](std::ostream& f) { write_results_csv(f, summary); });
    write_file(dir / "summary.csv", [&](std::ostream& f) { write_summary_csv(f, summary); });
    for (const auto& row : summary.rows) {
      write_file(dir / ("curves_" + std::string(to_string(row.variant)) + ".csv"),
                 [&](std::ostream& f) { write_curves_csv(f, row); });
    }
  }
  if (!o.plot.empty()) write_file(o.plot, [&](std::ostream& f) { write_curves_svg(f, summary); });
}

int run_gen_synth(const Options& o, std::ostream& out) {
  SynthConfig cfg;
  cfg.size = o.size;
  cfg.n_min = o.n_min;
  cfg.n_max = o.n_max;
  cfg.p_min = o.p_min;
  cfg.p_max = o.p_max;
  cfg.seed = *o.seed;
  const bool density = parse_synth_rule(o.rule) == SynthRule::Density;
  Dataset ds = density ? build_synthetic1(cfg) : build_synthetic2(cfg);
  ds.name = !o.name.empty() ? o.name : density ? "SYNTHETIC_1" : "SYNTHETIC_2";
  const fs::path file = save_tu_dataset(ds, o.out);
  out << format_stats(ds.name, dataset_stats(ds));
  out << "wrote " << file.string() << '\n';
  return kOk;
}

int run_intervalize(const Options& o, std::ostream& out) {
  Dataset ds = intervalize_tags(load_tu_dataset(o.data), parse_interval_mode(o.mode), *o.seed);
  if (!o.name.empty()) ds.name = o.name;
  const fs::path file = save_tu_dataset(ds, o.out);
  out << format_stats(ds.name, dataset_stats(ds));
  out << "wrote " << file.string() << '\n';
  return kOk;
}

int run_train(const Options& o, std::ostream& out) {
  const Dataset ds = load_training_data(o);
  const TrainConfig tc = train_config(o);
  const FoldSplit split = stratified_kfold(ds, tc.folds, split_seed(tc.seed, 0));
  if (o.fold >= tc.folds) throw std::invalid_argument("--fold must be < --folds");
  std::unique_ptr<IvGnnModel> model;
  const FoldReport r = train_fold(ds, split, o.fold, model_config(o), tc, 0, &model);
  out << "epoch,loss,train_acc,test_acc\n" << std::setprecision(10);
  for (std::size_t e = 0; e < r.train_acc.size(); ++e) {
    out << e << ',' << r.epoch_loss[e] << ',' << r.train_acc[e] << ',' << r.test_acc[e] << '\n';
  }
  out << "# best_epoch " << r.best_epoch << " best_test_acc " << r.best_test_acc << '\n';
  if (!o.out.empty()) {
    nn::save_checkpoint(o.out, model->state_dict());
    out << "# checkpoint " << o.out << '\n';
  }
  return kOk;
}

int run_cv(const Options& o, std::ostream& out, std::ostream& err, bool all_variants) {
  const Dataset ds = load_training_data(o);
  const TrainConfig tc = train_config(o);
  const ModelConfig mc = model_config(o);
  const ProgressFn progress = [&err](const std::string& msg) { err << msg << '\n'; };
  ExperimentSummary summary;
  if (all_variants) {
    summary = compare_aggregators(ds, mc, tc, progress);
  } else {
    summary.dataset = ds.name;
    summary.rows.push_back(cross_validate(ds, mc, tc, progress));
  }
  emit_experiment(o, summary, out);
  return kOk;
}

int run_axioms(const Options& o, std::ostream& out) {
  std::vector<Aggregator> variants;
  if (o.variant == "all") {
    variants.assign(std::begin(kAllAggregators), std::end(kAllAggregators));
  } else {
    variants.push_back(parse_aggregator(o.variant));
  }
  for (Aggregator v : variants) out << format_report(check_axioms(v, o.grid));
  if (o.order) {
    const OrderReport r = check_leq_new_order(o.grid);
    out << "leq_new reflexivity " << (r.reflexivity_violations ? "FAIL" : "PASS") << '\n'
        << "leq_new antisymmetry " << (r.antisymmetry_violations ? "FAIL" : "PASS") << '\n'
        << "leq_new transitivity " << (r.transitivity_violations ? "FAIL" : "PASS") << '\n'
        << "leq_new totality " << (r.totality_violations ? "FAIL" : "PASS") << '\n'
        << "leq_new bounds " << (r.bound_violations ? "FAIL" : "PASS") << '\n';
  }
  return kOk;
}

int run_bench(const Options& o, std::ostream& out) {
  const auto rows = complexity_bench(o.sizes, o.hiddens, o.layers, *o.seed, o.trials);
  write_bench_csv(out, rows);
  for (std::size_t h : o.hiddens) {
    std::vector<double> xs, ys;
    for (const auto& r : rows)
      if (r.hidden_dim == h) {
        xs.push_back(static_cast<double>(r.num_nodes));
        ys.push_back(r.seconds_per_epoch);
      }
    if (xs.size() >= 2) {
      const LinearFit fit = fit_line(xs, ys);
      out << "# hidden " << h << " time~|V| slope " << fit.slope << " intercept " << fit.intercept
          << " r2 " << fit.r2 << '\n';
    }
  }
  if (!o.out.empty()) write_file(o.out, [&](std::ostream& f) { write_bench_csv(f, rows); });
  return kOk;
}

int run_stats(const Options& o, std::ostream& out) {
  const Dataset ds = load_tu_dataset(o.data);
  out << format_stats(ds.name, dataset_stats(ds));
  return kOk;
}

int usage_error(const Parser& p, const std::string& msg, std::ostream& err) {
  err << "error: " << msg << "\n\n" << p.app.help();
  return kUsage;
}

}  // namespace

std::map<std::string, std::string> parse_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key or value");
    }
    if (!kv.emplace(key, value).second) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto parser = std::make_unique<Parser>();
  try {
    parser->parse(args);
  } catch (const CLI::CallForHelp&) {
    out << parser->app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << parser->app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    return usage_error(*parser, e.what(), err);
  }

  if (!parser->o.config.empty()) {
    std::map<std::string, std::string> kv;
    try {
      std::ifstream f(parser->o.config);
      if (!f) {
        err << "error: cannot open config " << parser->o.config << '\n';
        return kRuntime;
      }
      kv = parse_config(f);
    } catch (const std::invalid_argument& e) {
      return usage_error(*parser, e.what(), err);
    }
    CLI::App* sub = parser->selected();
    std::vector<std::string> merged = args;
    for (const auto& [key, value] : kv) {
      const CLI::Option* opt = sub->get_option_no_throw("--" + key);
      if (!opt || key == "config") return usage_error(*parser, "unknown config key '" + key + "'", err);
      if (opt->count() > 0) continue;  // flag wins
      if (opt->get_expected_max() == 0) {
        if (value == "true" || value == "1") merged.push_back("--" + key);
        else if (value != "false" && value != "0")
          return usage_error(*parser, "config key '" + key + "' expects true or false", err);
      } else {
        merged.push_back("--" + key);
        merged.push_back(value);
      }
    }
    parser = std::make_unique<Parser>();
    try {
      parser->parse(merged);
    } catch (const CLI::ParseError& e) {
      return usage_error(*parser, e.what(), err);
    }
  }

  const Options& o = parser->o;
  const std::string name = parser->selected()->get_name();
  try {
    if (name == "train" || name == "cv" || name == "compare") {
      ModelConfig mc = model_config(o);
      mc.input_dim = 1;
      mc.validate();
      train_config(o);
    }
    if (name == "gen-synth") {
      SynthConfig cfg;
      cfg.size = o.size;
      cfg.n_min = o.n_min;
      cfg.n_max = o.n_max;
      cfg.p_min = o.p_min;
      cfg.p_max = o.p_max;
      cfg.validate();
    }
  } catch (const std::invalid_argument& e) {
    return usage_error(*parser, e.what(), err);
  }
  try {
    if (name == "gen-synth") return run_gen_synth(o, out);
    if (name == "intervalize") return run_intervalize(o, out);
    if (name == "train") return run_train(o, out);
    if (name == "cv") return run_cv(o, out, err, false);
    if (name == "compare") return run_cv(o, out, err, true);
    if (name == "axioms") return run_axioms(o, out);
    if (name == "bench") return run_bench(o, out);
    if (name == "stats") return run_stats(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return usage_error(*parser, "unknown subcommand", err);
}

}  // namespace ivgnn::cli
