#include "ivgnn/synth.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace ivgnn {

void SynthConfig::validate() const {
  if (size < 2) throw std::invalid_argument("synth: size must be at least 2");
  if (n_min < 2 || n_min > n_max) throw std::invalid_argument("synth: need 2 <= n_min <= n_max");
  if (!(p_min > 0.0 && p_min <= p_max && p_max < 1.0)) {
    throw std::invalid_argument("synth: need 0 < p_min <= p_max < 1");
  }
}

SynthRule parse_synth_rule(std::string_view name) {
  if (name == "density") return SynthRule::Density;
  if (name == "clustering") return SynthRule::Clustering;
  throw std::invalid_argument("unknown rule '" + std::string(name) +
                              "' (expected density or clustering)");
}

Graph gen_er_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      if (coin(rng) < p) edges.emplace_back(i, j);
    }
  }
  return make_graph(n, edges);
}

double density(const Graph& g) {
  return static_cast<double>(g.num_edges()) / static_cast<double>(g.num_nodes());
}

double clustering(const Graph& g, std::size_t u) {
  const auto& nb = g.adjacency.at(u);
  const std::size_t d = nb.size();
  if (d < 2) return 0.0;
  std::size_t links = 0;
  for (std::size_t i = 0; i < d; ++i) {
    const auto& ni = g.adjacency[nb[i]];
    for (std::size_t j = i + 1; j < d; ++j) {
      if (std::binary_search(ni.begin(), ni.end(), nb[j])) ++links;
    }
  }
  return static_cast<double>(links) / (static_cast<double>(d * (d - 1)) / 2.0);
}

double graph_clustering(const Graph& g) {
  double total = 0.0;
  for (std::size_t u = 0; u < g.num_nodes(); ++u) total += clustering(g, u);
  return total / static_cast<double>(g.num_nodes());
}

std::vector<Graph> gen_base_graphs(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> nodes(cfg.n_min, cfg.n_max);
  std::uniform_real_distribution<double> prob(cfg.p_min, cfg.p_max);
  std::vector<Graph> graphs;
  graphs.reserve(cfg.size);
  for (std::size_t i = 0; i < cfg.size; ++i) {
    const std::size_t n = nodes(rng);
    const double p = prob(rng);
    graphs.push_back(gen_er_graph(n, p, rng));
  }
  return graphs;
}

Dataset label_synthetic1(std::vector<Graph> graphs) {
  double density_sum = 0.0;
  std::size_t degree_sum = 0, node_count = 0;
  for (const auto& g : graphs) {
    density_sum += density(g);
    degree_sum += 2 * g.num_edges();
    node_count += g.num_nodes();
  }
  const double avg_density = density_sum / static_cast<double>(graphs.size());
  const double avg_degree = static_cast<double>(degree_sum) / static_cast<double>(node_count);

  std::set<int> tags_seen;
  for (auto& g : graphs) {
    g.label = density(g) < avg_density ? 1 : 0;
    for (std::size_t v = 0; v < g.num_nodes(); ++v) {
      const auto& nb = g.adjacency[v];
      g.node_tags[v] = static_cast<double>(nb.size()) < avg_degree ? 1 : 0;
      tags_seen.insert(g.node_tags[v]);
      RawInterval f{-1.0, 0.0};
      if (!nb.empty()) {
        std::size_t dmin = g.degree(nb.front()), dmax = dmin;
        for (auto u : nb) {
          dmin = std::min(dmin, g.degree(u));
          dmax = std::max(dmax, g.degree(u));
        }
        f = nb.size() > 1 ? RawInterval{static_cast<double>(dmin), static_cast<double>(dmax)}
                          : RawInterval{-1.0, static_cast<double>(dmax)};
      }
      g.node_features[v] = {f};
    }
  }
  // Dense tag ids even if one tag value never occurs.
  if (tags_seen.size() == 1) {
    for (auto& g : graphs) std::fill(g.node_tags.begin(), g.node_tags.end(), 0);
  }
  Dataset ds;
  ds.name = "synthetic1";
  ds.graphs = std::move(graphs);
  ds.num_classes = 2;
  ds.tag_vocabulary_size = static_cast<int>(tags_seen.size());
  ds.feature_dim = 1;
  return ds;
}

Dataset label_synthetic2(std::vector<Graph> graphs) {
  double cluster_sum = 0.0;
  std::map<std::size_t, int> degree_id;
  for (const auto& g : graphs) {
    cluster_sum += graph_clustering(g);
    for (std::size_t v = 0; v < g.num_nodes(); ++v) degree_id.emplace(g.degree(v), 0);
  }
  int next = 0;
  for (auto& [deg, id] : degree_id) id = next++;
  const double avg_cluster = cluster_sum / static_cast<double>(graphs.size());

  for (auto& g : graphs) {
    g.label = graph_clustering(g) < avg_cluster ? 1 : 0;
    std::vector<double> c(g.num_nodes());
    for (std::size_t u = 0; u < g.num_nodes(); ++u) c[u] = clustering(g, u);
    for (std::size_t v = 0; v < g.num_nodes(); ++v) {
      g.node_tags[v] = degree_id.at(g.degree(v));
      RawInterval f{0.0, 0.0};
      const auto& nb = g.adjacency[v];
      if (!nb.empty()) {
        f = {c[nb.front()], c[nb.front()]};
        for (auto u : nb) {
          f.lo = std::min(f.lo, c[u]);
          f.hi = std::max(f.hi, c[u]);
        }
      }
      g.node_features[v] = {f};
    }
  }
  Dataset ds;
  ds.name = "synthetic2";
  ds.graphs = std::move(graphs);
  ds.num_classes = 2;
  ds.tag_vocabulary_size = static_cast<int>(degree_id.size());
  ds.feature_dim = 1;
  return ds;
}

Dataset build_synthetic1(const SynthConfig& cfg) { return label_synthetic1(gen_base_graphs(cfg)); }

Dataset build_synthetic2(const SynthConfig& cfg) { return label_synthetic2(gen_base_graphs(cfg)); }

}  // namespace ivgnn
