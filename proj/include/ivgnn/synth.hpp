#pragma once

// Synthetic graph-classification datasets labeled by graph density
// (SYNTHETIC_1) or by average clustering coefficient (SYNTHETIC_2).

#include <cstdint>
#include <random>
#include <vector>

#include "ivgnn/graph.hpp"

namespace ivgnn {

struct SynthConfig {
  std::size_t size = 200;
  std::size_t n_min = 10;
  std::size_t n_max = 30;
  double p_min = 0.1;
  double p_max = 0.4;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class SynthRule { Density, Clustering };
SynthRule parse_synth_rule(std::string_view name);

/// Erdos-Renyi G(n, p): every unordered pair is an edge independently with
/// probability p.
Graph gen_er_graph(std::size_t n, double p, std::mt19937_64& rng);

/// |E| / |V|.
double density(const Graph& g);

/// Fraction of connected neighbor pairs of u; 0 when degree(u) < 2.
double clustering(const Graph& g, std::size_t u);
/// Mean of clustering() over all nodes.
double graph_clustering(const Graph& g);

/// The untagged random graphs both constructions start from.
std::vector<Graph> gen_base_graphs(const SynthConfig& cfg);

/// Applies the density rules: label 1 iff density < dataset average; tag 1
/// iff degree < average degree over all nodes of the dataset; feature is the
/// neighbor-degree interval ([d_min,d_max], [-1,d_max] for one neighbor,
/// [-1,0] for none).
Dataset label_synthetic1(std::vector<Graph> graphs);

/// Applies the clustering rules: label 1 iff C(G) < dataset average; tag is
/// the degree; feature is [c_min, c_max] over the neighbors' clustering
/// coefficients ([0,0] for isolated nodes).
Dataset label_synthetic2(std::vector<Graph> graphs);

Dataset build_synthetic1(const SynthConfig& cfg);
Dataset build_synthetic2(const SynthConfig& cfg);

}  // namespace ivgnn
