#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "graphpop/graph.hpp"
#include "graphpop/rng.hpp"

namespace support {

using graphpop::AttributedGraph;
using graphpop::Edge;

/// Each pair independently with probability p; features N(0,1), labels uniform in [0, k).
inline AttributedGraph random_graph(int n, double p, graphpop::Rng& rng, int feat = 0, int k = 0) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(rng)) edges.push_back({u, v});
  Eigen::MatrixXd x(n, feat);
  std::normal_distribution<double> normal;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < feat; ++j) x(i, j) = normal(rng);
  std::vector<int> labels;
  if (k > 0) {
    std::uniform_int_distribution<int> lab(0, k - 1);
    for (int i = 0; i < n; ++i) labels.push_back(lab(rng));
  }
  return AttributedGraph(n, std::move(edges), std::move(x), std::move(labels));
}

inline std::vector<std::vector<int>> adjacency(const AttributedGraph& g) {
  std::vector<std::vector<int>> a(g.num_nodes(), std::vector<int>(g.num_nodes(), 0));
  for (const auto& e : g.edges()) a[e.u][e.v] = a[e.v][e.u] = 1;
  return a;
}

inline std::vector<int> random_permutation(int n, graphpop::Rng& rng) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

inline AttributedGraph make_graph(int n, std::vector<Edge> edges, std::vector<int> labels = {}) {
  return AttributedGraph(n, std::move(edges), {}, std::move(labels));
}

}  // namespace support
