#pragma once

// Graph and dataset model, TU text format I/O, feature preparation and
// stratified fold splitting.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ivgnn/interval.hpp"

namespace ivgnn {

struct RawInterval {
  double lo = 0.0;
  double hi = 0.0;
};

inline bool operator==(const RawInterval& a, const RawInterval& b) {
  return a.lo == b.lo && a.hi == b.hi;
}

using Adjacency = std::vector<std::vector<std::uint32_t>>;

struct Graph {
  Adjacency adjacency;                                // sorted, symmetric, no self-loops
  std::vector<int> node_tags;                         // dense tag ids
  std::vector<std::vector<RawInterval>> node_features;  // [node][dim]
  int label = 0;

  std::size_t num_nodes() const { return adjacency.size(); }
  std::size_t num_edges() const;
  std::size_t degree(std::size_t v) const { return adjacency[v].size(); }
};

/// Builds a graph from an undirected edge list. Duplicate edges are merged;
/// self-loops are rejected.
Graph make_graph(std::size_t num_nodes,
                 std::span<const std::pair<std::uint32_t, std::uint32_t>> edges, int label = 0);

/// Throws std::invalid_argument if adjacency or features break the Graph
/// invariants.
void validate_graph(const Graph& g, std::size_t feature_dim);

struct NormStats {
  double min = 0.0;
  double max = 1.0;
};

struct Dataset {
  std::string name;
  std::vector<Graph> graphs;
  int num_classes = 0;
  int tag_vocabulary_size = 0;
  std::size_t feature_dim = 0;
  std::vector<NormStats> norm_stats;  // empty until fit_normalization

  std::size_t size() const { return graphs.size(); }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Parses the TU text format. Tags and graph labels are remapped to dense ids
/// in ascending order of their original values.
Dataset parse_tu(std::istream& in, std::string name = {});

/// Reads per-node interval features ("lo hi" pairs per node line) into `ds`.
void read_interval_sidecar(std::istream& in, Dataset& ds);

void write_tu(std::ostream& out, const Dataset& ds);
void write_interval_sidecar(std::ostream& out, const Dataset& ds);

/// Loads `path` and, when present, its `.ivl` sidecar. A directory argument
/// must contain exactly one `.txt` file.
Dataset load_tu_dataset(const std::filesystem::path& path);

/// Writes `<dir>/<ds.name>.txt` and, if features exist, `<dir>/<ds.name>.ivl`.
/// Returns the path of the TU file.
std::filesystem::path save_tu_dataset(const Dataset& ds, const std::filesystem::path& dir);

enum class IntervalMode { Biased, Degenerate };
IntervalMode parse_interval_mode(std::string_view name);

/// Replaces node features by one interval per node derived from its tag c:
/// [c - |k1|, c + |k2|] with k1, k2 ~ N(0,1) drawn per node (biased) or [c, c]
/// (degenerate).
Dataset intervalize_tags(Dataset ds, IntervalMode mode, std::uint64_t seed);

/// Per-dimension min over lo and max over hi of the training graphs' nodes.
Dataset fit_normalization(Dataset ds, std::span<const std::size_t> train_indices);

/// Normalized feature of one node coordinate using ds.norm_stats.
UnitInterval normalized_feature(const Dataset& ds, const Graph& g, std::size_t node,
                                std::size_t dim);

struct FoldSplit {
  std::size_t fold_count = 10;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::size_t>> train;
  std::vector<std::vector<std::size_t>> test;
};

/// Deterministic stratified split. Requires k >= 2 and at least k members in
/// every class.
FoldSplit stratified_kfold(const Dataset& ds, std::size_t k, std::uint64_t seed);

struct DatasetStats {
  std::size_t size = 0;
  int classes = 0;
  double avg_nodes = 0.0;
  int tag_labels = 0;
};

DatasetStats dataset_stats(const Dataset& ds);
/// One header line plus one value line, in the column order of DatasetStats.
std::string format_stats(const std::string& name, const DatasetStats& stats);

}  // namespace ivgnn
