#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "ivgnn/synth.hpp"

using namespace ivgnn;

namespace {

using Edges = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

Graph complete(std::size_t n) {
  Edges e;
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = a + 1; b < n; ++b) e.emplace_back(a, b);
  return make_graph(n, e);
}

// A..F = 0..5 with degrees {2,2,3,3,2,4}; A's neighbors C,D; F's neighbors B,C,D,E.
Graph six_node_example() {
  const Edges e{{0, 2}, {0, 3}, {5, 1}, {5, 4}, {5, 2}, {5, 3}, {1, 2}, {3, 4}};
  return make_graph(6, e);
}

std::vector<std::vector<bool>> matrix(const Graph& g) {
  std::vector<std::vector<bool>> m(g.num_nodes(), std::vector<bool>(g.num_nodes(), false));
  for (std::size_t v = 0; v < g.num_nodes(); ++v)
    for (auto u : g.adjacency[v]) m[v][u] = true;
  return m;
}

// Triangles through u by enumerating all node pairs.
double brute_clustering(const Graph& g, std::size_t u) {
  const auto m = matrix(g);
  const std::size_t n = g.num_nodes();
  std::size_t deg = 0, tri = 0;
  for (std::size_t a = 0; a < n; ++a) deg += m[u][a];
  if (deg < 2) return 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (m[u][a] && m[u][b] && m[a][b]) ++tri;
  return static_cast<double>(tri) / (static_cast<double>(deg * (deg - 1)) / 2.0);
}

double brute_density(const Graph& g) {
  const auto m = matrix(g);
  std::size_t e = 0;
  for (std::size_t a = 0; a < g.num_nodes(); ++a)
    for (std::size_t b = a + 1; b < g.num_nodes(); ++b) e += m[a][b];
  return static_cast<double>(e) / static_cast<double>(g.num_nodes());
}

}  // namespace

TEST(ErGraph, ForcedCompleteIsTriangle) {
  std::mt19937_64 rng(1);
  const Graph g = gen_er_graph(3, 0.999999999, rng);
  EXPECT_EQ(g.num_edges(), 3u);
}

TEST(ErGraph, DeterministicUnderSeed) {
  std::mt19937_64 a(42), b(42);
  EXPECT_EQ(gen_er_graph(5, 0.5, a).adjacency, gen_er_graph(5, 0.5, b).adjacency);
}

TEST(ErGraph, EdgeCountIsBinomial) {
  std::mt19937_64 rng(7);
  const double p = 0.3, pairs = 190.0;
  double sum = 0.0;
  const int draws = 1000;
  for (int i = 0; i < draws; ++i) sum += static_cast<double>(gen_er_graph(20, p, rng).num_edges());
  const double mean = sum / draws;
  const double sigma_of_mean = std::sqrt(pairs * p * (1 - p) / draws);
  EXPECT_NEAR(mean, 57.0, 3 * sigma_of_mean);
}

TEST(Density, Examples) {
  EXPECT_DOUBLE_EQ(density(complete(3)), 1.0);
  const Edges path{{0, 1}, {1, 2}};
  EXPECT_DOUBLE_EQ(density(make_graph(3, path)), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(density(six_node_example()), 8.0 / 6.0);
}

TEST(Clustering, CompleteAndStar) {
  const Graph k4 = complete(4);
  for (std::size_t u = 0; u < 4; ++u) EXPECT_DOUBLE_EQ(clustering(k4, u), 1.0);
  EXPECT_DOUBLE_EQ(graph_clustering(k4), 1.0);
  const Edges star{{0, 1}, {0, 2}, {0, 3}, {0, 4}};
  const Graph s = make_graph(5, star);
  for (std::size_t u = 0; u < 5; ++u) EXPECT_DOUBLE_EQ(clustering(s, u), 0.0);
}

TEST(Clustering, CycleWithChordMatchesBruteForce) {
  const Edges e{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}};
  const Graph g = make_graph(4, e);
  for (std::size_t u = 0; u < 4; ++u) EXPECT_DOUBLE_EQ(clustering(g, u), brute_clustering(g, u));
  EXPECT_DOUBLE_EQ(clustering(g, 0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(clustering(g, 1), 1.0);
}

TEST(Clustering, FuzzAgainstOracle) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> nodes(2, 8);
  std::uniform_real_distribution<double> prob(0.05, 0.95);
  for (int t = 0; t < 300; ++t) {
    const Graph g = gen_er_graph(nodes(rng), prob(rng), rng);
    double mean = 0.0;
    for (std::size_t u = 0; u < g.num_nodes(); ++u) {
      const double c = clustering(g, u);
      ASSERT_DOUBLE_EQ(c, brute_clustering(g, u));
      ASSERT_GE(c, 0.0);
      ASSERT_LE(c, 1.0);
      mean += c;
    }
    ASSERT_NEAR(graph_clustering(g), mean / static_cast<double>(g.num_nodes()), 1e-12);
    ASSERT_DOUBLE_EQ(density(g), brute_density(g));
  }
}

TEST(Synthetic1, SixNodeExample) {
  const Dataset ds = label_synthetic1({six_node_example()});
  const auto& f = ds.graphs[0].node_features;
  EXPECT_EQ(f[0][0], (RawInterval{3, 3}));  // A
  EXPECT_EQ(f[5][0], (RawInterval{2, 3}));  // F
}

TEST(Synthetic1, SparseCases) {
  // node 2 isolated; node 0 has one neighbor of degree 1
  const Edges e{{0, 1}};
  const Dataset ds = label_synthetic1({make_graph(3, e), complete(3)});
  const auto& f = ds.graphs[0].node_features;
  EXPECT_EQ(f[0][0], (RawInterval{-1, 1}));
  EXPECT_EQ(f[2][0], (RawInterval{-1, 0}));
}

TEST(Synthetic1, RulesRecheckedIndependently) {
  SynthConfig cfg;
  cfg.size = 200;
  cfg.seed = 21;
  const Dataset ds = build_synthetic1(cfg);
  ASSERT_EQ(ds.size(), 200u);
  double dsum = 0, deg = 0, nodes = 0;
  for (const auto& g : ds.graphs) {
    dsum += brute_density(g);
    nodes += static_cast<double>(g.num_nodes());
    for (std::size_t v = 0; v < g.num_nodes(); ++v) deg += static_cast<double>(g.degree(v));
  }
  const double avg_density = dsum / 200.0, avg_degree = deg / nodes;
  std::set<int> tags, labels;
  for (const auto& g : ds.graphs) {
    EXPECT_EQ(g.label == 1, brute_density(g) < avg_density);
    labels.insert(g.label);
    for (std::size_t v = 0; v < g.num_nodes(); ++v) {
      EXPECT_EQ(g.node_tags[v] == 1, static_cast<double>(g.degree(v)) < avg_degree);
      tags.insert(g.node_tags[v]);
      EXPECT_LE(g.node_features[v][0].lo, g.node_features[v][0].hi);
    }
  }
  EXPECT_EQ(labels.size(), 2u);
  EXPECT_EQ(tags.size(), 2u);
  EXPECT_EQ(ds.num_classes, 2);
  EXPECT_EQ(ds.tag_vocabulary_size, 2);
  EXPECT_NEAR(dataset_stats(ds).avg_nodes, 20.0, 1.5);
}

TEST(Synthetic2, CompleteAndTriangleFree) {
  const Edges path{{0, 1}, {1, 2}, {2, 3}};
  const Dataset ds = label_synthetic2({complete(4), make_graph(4, path)});
  for (const auto& f : ds.graphs[0].node_features) EXPECT_EQ(f[0], (RawInterval{1, 1}));
  for (const auto& f : ds.graphs[1].node_features) EXPECT_EQ(f[0], (RawInterval{0, 0}));
  // tags are dense ids of the observed degrees {1, 2, 3}
  EXPECT_EQ(ds.tag_vocabulary_size, 3);
  EXPECT_EQ(ds.graphs[0].node_tags[0], 2);
  EXPECT_EQ(ds.graphs[1].node_tags[0], 0);
  EXPECT_EQ(ds.graphs[0].label, 0);
  EXPECT_EQ(ds.graphs[1].label, 1);
}

TEST(Synthetic2, RulesRecheckedIndependently) {
  SynthConfig cfg;
  cfg.size = 200;
  cfg.seed = 22;
  const Dataset ds = build_synthetic2(cfg);
  double csum = 0;
  std::vector<double> cg;
  for (const auto& g : ds.graphs) {
    double c = 0;
    for (std::size_t u = 0; u < g.num_nodes(); ++u) c += brute_clustering(g, u);
    cg.push_back(c / static_cast<double>(g.num_nodes()));
    csum += cg.back();
  }
  const double avg = csum / 200.0;
  std::set<std::size_t> degrees;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Graph& g = ds.graphs[i];
    EXPECT_EQ(g.label == 1, cg[i] < avg);
    for (std::size_t v = 0; v < g.num_nodes(); ++v) {
      degrees.insert(g.degree(v));
      const auto f = g.node_features[v][0];
      EXPECT_LE(f.lo, f.hi);
      EXPECT_GE(f.lo, 0.0);
      EXPECT_LE(f.hi, 1.0);
    }
  }
  EXPECT_EQ(ds.tag_vocabulary_size, static_cast<int>(degrees.size()));
  EXPECT_GE(ds.tag_vocabulary_size, 15);
}

TEST(Synthetic, Deterministic) {
  SynthConfig cfg;
  cfg.size = 50;
  cfg.seed = 8;
  const Dataset a = build_synthetic1(cfg), b = build_synthetic1(cfg);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.graphs[i].adjacency, b.graphs[i].adjacency);
    EXPECT_EQ(a.graphs[i].node_features, b.graphs[i].node_features);
    EXPECT_EQ(a.graphs[i].node_tags, b.graphs[i].node_tags);
  }
}

TEST(SynthConfigTest, Validation) {
  SynthConfig c;
  c.size = 1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SynthConfig{};
  c.n_min = 1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SynthConfig{};
  c.p_max = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = SynthConfig{};
  c.n_min = 31;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_NO_THROW(SynthConfig{}.validate());
  EXPECT_EQ(parse_synth_rule("clustering"), SynthRule::Clustering);
  EXPECT_THROW(parse_synth_rule("degree"), std::invalid_argument);
}
