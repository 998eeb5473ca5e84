#include "ivgnn/graph.hpp"

#include <limits>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace ivgnn {
namespace {

std::vector<std::string> split_tokens(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

long long parse_int(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "expected integer, got '" + tok + "'");
  }
  if (used != tok.size()) throw ParseError(line, "expected integer, got '" + tok + "'");
  return v;
}

double parse_real(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "expected real, got '" + tok + "'");
  }
  if (used != tok.size() || !std::isfinite(v)) {
    throw ParseError(line, "expected real, got '" + tok + "'");
  }
  return v;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-blank line, tokenized.
  std::vector<std::string> next(const char* what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      auto toks = split_tokens(line);
      if (!toks.empty()) return toks;
    }
    throw ParseError(line_no_ + 1, std::string("unexpected end of file, expected ") + what);
  }

  bool has_more() {
    std::string line;
    while (in_.peek() != EOF) {
      const auto pos = in_.tellg();
      std::getline(in_, line);
      if (!split_tokens(line).empty()) {
        in_.seekg(pos);
        return true;
      }
      ++line_no_;
    }
    return false;
  }

  std::size_t line() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace

std::size_t Graph::num_edges() const {
  std::size_t total = 0;
  for (const auto& nb : adjacency) total += nb.size();
  return total / 2;
}

Graph make_graph(std::size_t num_nodes,
                 std::span<const std::pair<std::uint32_t, std::uint32_t>> edges, int label) {
  Graph g;
  g.adjacency.assign(num_nodes, {});
  g.node_tags.assign(num_nodes, 0);
  g.node_features.assign(num_nodes, {});
  g.label = label;
  for (auto [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes) throw std::invalid_argument("edge index out of range");
    if (u == v) throw std::invalid_argument("self-loop in edge list");
    g.adjacency[u].push_back(v);
    g.adjacency[v].push_back(u);
  }
  for (auto& nb : g.adjacency) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return g;
}

void validate_graph(const Graph& g, std::size_t feature_dim) {
  const std::size_t n = g.num_nodes();
  if (g.node_tags.size() != n || g.node_features.size() != n) {
    throw std::invalid_argument("graph: per-node arrays disagree with node count");
  }
  for (std::size_t v = 0; v < n; ++v) {
    const auto& nb = g.adjacency[v];
    if (!std::is_sorted(nb.begin(), nb.end())) throw std::invalid_argument("graph: unsorted adjacency");
    for (auto u : nb) {
      if (u >= n) throw std::invalid_argument("graph: neighbor index out of range");
      if (u == v) throw std::invalid_argument("graph: self-loop");
      if (!std::binary_search(g.adjacency[u].begin(), g.adjacency[u].end(),
                              static_cast<std::uint32_t>(v))) {
        throw std::invalid_argument("graph: asymmetric adjacency");
      }
    }
    if (g.node_features[v].size() != feature_dim) {
      throw std::invalid_argument("graph: feature dimension mismatch");
    }
    for (const auto& f : g.node_features[v]) {
      if (!(f.lo <= f.hi)) throw std::invalid_argument("graph: feature interval with lo > hi");
    }
  }
}

Dataset parse_tu(std::istream& in, std::string name) {
  LineReader reader(in);
  auto head = reader.next("graph count");
  if (head.size() != 1) throw ParseError(reader.line(), "expected a single graph count");
  const long long count = parse_int(head[0], reader.line());
  if (count < 0) throw ParseError(reader.line(), "negative graph count");

  struct RawGraph {
    std::vector<std::vector<long long>> nbrs;
    std::vector<long long> tags;
    long long label;
  };
  std::vector<RawGraph> raw(static_cast<std::size_t>(count));
  std::set<long long> tag_values, label_values;

  for (auto& rg : raw) {
    auto gh = reader.next("graph header 'n l'");
    if (gh.size() != 2) throw ParseError(reader.line(), "graph header must be 'n l'");
    const long long n = parse_int(gh[0], reader.line());
    if (n < 0) throw ParseError(reader.line(), "negative node count");
    rg.label = parse_int(gh[1], reader.line());
    label_values.insert(rg.label);
    rg.nbrs.resize(static_cast<std::size_t>(n));
    rg.tags.resize(static_cast<std::size_t>(n));
    for (long long v = 0; v < n; ++v) {
      auto toks = reader.next("node line 't m u1 ... um'");
      if (toks.size() < 2) throw ParseError(reader.line(), "node line needs tag and neighbor count");
      rg.tags[v] = parse_int(toks[0], reader.line());
      const long long m = parse_int(toks[1], reader.line());
      if (m < 0 || static_cast<std::size_t>(m) != toks.size() - 2) {
        throw ParseError(reader.line(), "neighbor count does not match neighbor list");
      }
      for (long long i = 0; i < m; ++i) {
        const long long u = parse_int(toks[2 + i], reader.line());
        if (u < 0 || u >= n) throw ParseError(reader.line(), "dangling neighbor index " + toks[2 + i]);
        rg.nbrs[v].push_back(u);
      }
      tag_values.insert(rg.tags[v]);
    }
  }
  if (reader.has_more()) throw ParseError(reader.line() + 1, "trailing content after last graph");

  std::map<long long, int> tag_id, label_id;
  for (long long t : tag_values) tag_id.emplace(t, static_cast<int>(tag_id.size()));
  for (long long l : label_values) label_id.emplace(l, static_cast<int>(label_id.size()));

  Dataset ds;
  ds.name = std::move(name);
  ds.num_classes = static_cast<int>(label_id.size());
  ds.tag_vocabulary_size = static_cast<int>(tag_id.size());
  ds.feature_dim = 0;
  for (const auto& rg : raw) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::size_t v = 0; v < rg.nbrs.size(); ++v) {
      for (long long u : rg.nbrs[v]) {
        if (static_cast<std::size_t>(u) != v) edges.emplace_back(static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(u));
      }
    }
    Graph g = make_graph(rg.nbrs.size(), edges, label_id.at(rg.label));
    for (std::size_t v = 0; v < rg.tags.size(); ++v) g.node_tags[v] = tag_id.at(rg.tags[v]);
    ds.graphs.push_back(std::move(g));
  }
  return ds;
}

void read_interval_sidecar(std::istream& in, Dataset& ds) {
  LineReader reader(in);
  std::size_t dim = 0;
  for (auto& g : ds.graphs) {
    for (std::size_t v = 0; v < g.num_nodes(); ++v) {
      auto toks = reader.next("interval line 'lo hi'");
      if (toks.size() % 2 != 0) throw ParseError(reader.line(), "interval line needs lo/hi pairs");
      if (dim == 0) dim = toks.size() / 2;
      if (toks.size() / 2 != dim) throw ParseError(reader.line(), "inconsistent interval dimension");
      std::vector<RawInterval> f(dim);
      for (std::size_t d = 0; d < dim; ++d) {
        f[d] = {parse_real(toks[2 * d], reader.line()), parse_real(toks[2 * d + 1], reader.line())};
        if (f[d].lo > f[d].hi) throw ParseError(reader.line(), "interval with lo > hi");
      }
      g.node_features[v] = std::move(f);
    }
  }
  if (reader.has_more()) throw ParseError(reader.line() + 1, "sidecar has more lines than nodes");
  ds.feature_dim = dim;
  ds.norm_stats.clear();
}

void write_tu(std::ostream& out, const Dataset& ds) {
  out << ds.graphs.size() << '\n';
  for (const auto& g : ds.graphs) {
    out << g.num_nodes() << ' ' << g.label << '\n';
    for (std::size_t v = 0; v < g.num_nodes(); ++v) {
      out << g.node_tags[v] << ' ' << g.adjacency[v].size();
      for (auto u : g.adjacency[v]) out << ' ' << u;
      out << '\n';
    }
  }
}

void write_interval_sidecar(std::ostream& out, const Dataset& ds) {
  const auto old = out.precision(17);
  for (const auto& g : ds.graphs) {
    for (const auto& f : g.node_features) {
      for (std::size_t d = 0; d < f.size(); ++d) {
        out << (d ? " " : "") << f[d].lo << ' ' << f[d].hi;
      }
      out << '\n';
    }
  }
  out.precision(old);
}

Dataset load_tu_dataset(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  fs::path file = path;
  if (fs::is_directory(path)) {
    std::vector<fs::path> found;
    for (const auto& e : fs::directory_iterator(path)) {
      if (e.is_regular_file() && e.path().extension() == ".txt") found.push_back(e.path());
    }
    if (found.size() != 1) {
      throw std::runtime_error("expected exactly one .txt dataset in " + path.string());
    }
    file = found.front();
  }
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  Dataset ds = parse_tu(in, file.stem().string());
  fs::path side = file;
  side.replace_extension(".ivl");
  if (fs::exists(side)) {
    std::ifstream sin(side);
    try {
      read_interval_sidecar(sin, ds);
    } catch (const ParseError& e) {
      throw std::runtime_error(side.string() + ": " + e.what());
    }
  }
  return ds;
}

std::filesystem::path save_tu_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string stem = ds.name.empty() ? "dataset" : ds.name;
  const fs::path tu = dir / (stem + ".txt");
  {
    std::ofstream out(tu);
    if (!out) throw std::runtime_error("cannot write " + tu.string());
    write_tu(out, ds);
  }
  const fs::path side = dir / (stem + ".ivl");
  if (ds.feature_dim > 0) {
    std::ofstream out(side);
    write_interval_sidecar(out, ds);
  } else if (fs::exists(side)) {
    fs::remove(side);
  }
  return tu;
}

IntervalMode parse_interval_mode(std::string_view name) {
  if (name == "biased") return IntervalMode::Biased;
  if (name == "degenerate") return IntervalMode::Degenerate;
  throw std::invalid_argument("unknown interval mode '" + std::string(name) +
                              "' (expected biased or degenerate)");
}

Dataset intervalize_tags(Dataset ds, IntervalMode mode, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& g : ds.graphs) {
    for (std::size_t v = 0; v < g.num_nodes(); ++v) {
      const double c = g.node_tags[v];
      RawInterval f{c, c};
      if (mode == IntervalMode::Biased) {
        const double k1 = normal(rng);
        const double k2 = normal(rng);
        f = {c - std::abs(k1), c + std::abs(k2)};
      }
      g.node_features[v] = {f};
    }
  }
  ds.feature_dim = 1;
  ds.norm_stats.clear();
  return ds;
}

Dataset fit_normalization(Dataset ds, std::span<const std::size_t> train_indices) {
  if (ds.feature_dim == 0) throw std::invalid_argument("fit_normalization: dataset has no features");
  std::vector<NormStats> stats(ds.feature_dim,
                               {std::numeric_limits<double>::infinity(),
                                -std::numeric_limits<double>::infinity()});
  for (std::size_t idx : train_indices) {
    const Graph& g = ds.graphs.at(idx);
    for (const auto& f : g.node_features) {
      for (std::size_t d = 0; d < ds.feature_dim; ++d) {
        stats[d].min = std::min(stats[d].min, f[d].lo);
        stats[d].max = std::max(stats[d].max, f[d].hi);
      }
    }
  }
  for (std::size_t d = 0; d < stats.size(); ++d) {
    if (!(stats[d].min < stats[d].max)) {
      throw std::invalid_argument("fit_normalization: feature dimension " + std::to_string(d) +
                                  " is constant over the training graphs");
    }
  }
  ds.norm_stats = std::move(stats);
  return ds;
}

UnitInterval normalized_feature(const Dataset& ds, const Graph& g, std::size_t node,
                                std::size_t dim) {
  const RawInterval& f = g.node_features[node][dim];
  const NormStats& s = ds.norm_stats.at(dim);
  return normalize(f.lo, f.hi, s.min, s.max);
}

FoldSplit stratified_kfold(const Dataset& ds, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("stratified_kfold: k must be at least 2");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < ds.graphs.size(); ++i) by_class[ds.graphs[i].label].push_back(i);
  for (const auto& [label, members] : by_class) {
    if (members.size() < k) {
      throw std::invalid_argument("stratified_kfold: class " + std::to_string(label) + " has " +
                                  std::to_string(members.size()) + " members, fewer than k=" +
                                  std::to_string(k));
    }
  }
  std::mt19937_64 rng(seed);
  FoldSplit split;
  split.fold_count = k;
  split.seed = seed;
  split.test.assign(k, {});
  std::size_t next = 0;
  for (auto& [label, members] : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t idx : members) {
      split.test[next].push_back(idx);
      next = (next + 1) % k;
    }
  }
  split.train.assign(k, {});
  for (std::size_t f = 0; f < k; ++f) {
    std::sort(split.test[f].begin(), split.test[f].end());
    for (std::size_t o = 0; o < k; ++o) {
      if (o != f) split.train[f].insert(split.train[f].end(), split.test[o].begin(), split.test[o].end());
    }
    std::sort(split.train[f].begin(), split.train[f].end());
  }
  return split;
}

DatasetStats dataset_stats(const Dataset& ds) {
  DatasetStats s;
  s.size = ds.graphs.size();
  s.classes = ds.num_classes;
  std::size_t nodes = 0;
  for (const auto& g : ds.graphs) nodes += g.num_nodes();
  s.avg_nodes = s.size ? static_cast<double>(nodes) / static_cast<double>(s.size) : 0.0;
  s.tag_labels = ds.tag_vocabulary_size;
  return s;
}

std::string format_stats(const std::string& name, const DatasetStats& s) {
  std::ostringstream os;
  os << "dataset size classes avg_nodes labels\n"
     << name << ' ' << s.size << ' ' << s.classes << ' ' << std::fixed << std::setprecision(2)
     << s.avg_nodes << ' ' << s.tag_labels << '\n';
  return os.str();
}

}  // namespace ivgnn
