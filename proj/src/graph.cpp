#include "graphpop/graph.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "graphpop/errors.hpp"

namespace graphpop {

AttributedGraph::AttributedGraph(int num_nodes, std::vector<Edge> edges,
                                 Eigen::MatrixXd features,
                                 std::vector<int> labels)
    : num_nodes_(num_nodes),
      edges_(std::move(edges)),
      features_(std::move(features)),
      labels_(std::move(labels)) {
  if (num_nodes_ < 0) throw InvalidGraph("negative node count");
  for (auto& e : edges_) {
    if (e.u < 0 || e.v < 0 || e.u >= num_nodes_ || e.v >= num_nodes_)
      throw InvalidGraph("edge endpoint out of range: (" + std::to_string(e.u) +
                         "," + std::to_string(e.v) + ")");
    if (e.u == e.v)
      throw InvalidGraph("self-loop on node " + std::to_string(e.u));
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw InvalidGraph("duplicate edge");

  if (features_.size() == 0) features_.resize(num_nodes_, 0);
  if (features_.rows() != num_nodes_)
    throw InvalidGraph("feature rows do not match node count");
  if (!labels_.empty()) {
    if (static_cast<int>(labels_.size()) != num_nodes_)
      throw InvalidGraph("label count does not match node count");
    for (int l : labels_)
      if (l < 0) throw InvalidGraph("negative label");
  }

  offsets_.assign(num_nodes_ + 1, 0);
  for (const auto& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.resize(2 * edges_.size());
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    adjacency_[fill[e.u]++] = e.v;
    adjacency_[fill[e.v]++] = e.u;
  }
  for (int v = 0; v < num_nodes_; ++v)
    std::sort(adjacency_.begin() + offsets_[v], adjacency_.begin() + offsets_[v + 1]);
}

int AttributedGraph::num_classes() const noexcept {
  if (labels_.empty()) return 0;
  return *std::max_element(labels_.begin(), labels_.end()) + 1;
}

bool AttributedGraph::has_edge(int u, int v) const noexcept {
  if (u < 0 || v < 0 || u >= num_nodes_ || v >= num_nodes_) return false;
  if (degree(u) > degree(v)) std::swap(u, v);
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

AttributedGraph AttributedGraph::with_edges(std::vector<Edge> edges) const {
  return AttributedGraph(num_nodes_, std::move(edges), features_, labels_);
}

AttributedGraph AttributedGraph::with_features(Eigen::MatrixXd features) const {
  return AttributedGraph(num_nodes_, edges_, std::move(features), labels_);
}

AttributedGraph AttributedGraph::with_labels(std::vector<int> labels) const {
  return AttributedGraph(num_nodes_, edges_, features_, std::move(labels));
}

AttributedGraph AttributedGraph::permuted(std::span<const int> perm) const {
  if (static_cast<int>(perm.size()) != num_nodes_)
    throw InvalidArgument("permutation size does not match node count");
  std::vector<Edge> edges;
  edges.reserve(edges_.size());
  for (const auto& e : edges_) edges.push_back({perm[e.u], perm[e.v]});
  Eigen::MatrixXd features(num_nodes_, features_.cols());
  std::vector<int> labels(labels_.size());
  for (int i = 0; i < num_nodes_; ++i) {
    features.row(perm[i]) = features_.row(i);
    if (!labels_.empty()) labels[perm[i]] = labels_[i];
  }
  return AttributedGraph(num_nodes_, std::move(edges), std::move(features),
                         std::move(labels));
}

double average_degree(const AttributedGraph& g) {
  if (g.num_nodes() < 1) throw InvalidArgument("average_degree of empty graph");
  return 2.0 * g.num_edges() / g.num_nodes();
}

double edge_homogeneity(const AttributedGraph& g) {
  if (g.num_edges() == 0)
    throw InvalidArgument("edge homogeneity undefined on an edgeless graph");
  if (!g.has_labels()) throw InvalidArgument("edge homogeneity needs labels");
  const auto& labels = g.labels();
  std::int64_t same = 0;
  for (const auto& e : g.edges()) same += labels[e.u] == labels[e.v];
  return static_cast<double>(same) / g.num_edges();
}

double degree_gini(const AttributedGraph& g) {
  const int n = g.num_nodes();
  if (n < 1 || g.num_edges() == 0)
    throw InvalidArgument("degree Gini undefined when all degrees are zero");
  std::vector<std::int64_t> deg(n);
  for (int v = 0; v < n; ++v) deg[v] = g.degree(v);
  std::sort(deg.begin(), deg.end());
  // sum_i sum_j |d_i - d_j| over sorted degrees, kept in integers.
  std::int64_t pairwise = 0;
  for (int i = 0; i < n; ++i) pairwise += (2 * static_cast<std::int64_t>(i) - n + 1) * deg[i];
  pairwise *= 2;
  // 2 n^2 dbar = 4 n m
  return static_cast<double>(pairwise) /
         (4.0 * static_cast<double>(n) * static_cast<double>(g.num_edges()));
}

std::vector<std::int64_t> triangles_per_node(const AttributedGraph& g) {
  std::vector<std::int64_t> tri(g.num_nodes(), 0);
  for (const auto& e : g.edges()) {
    auto a = g.neighbors(e.u);
    auto b = g.neighbors(e.v);
    // count common neighbors w > v so each triangle is seen once
    auto ia = std::upper_bound(a.begin(), a.end(), e.v);
    auto ib = std::upper_bound(b.begin(), b.end(), e.v);
    while (ia != a.end() && ib != b.end()) {
      if (*ia < *ib) {
        ++ia;
      } else if (*ib < *ia) {
        ++ib;
      } else {
        ++tri[e.u];
        ++tri[e.v];
        ++tri[*ia];
        ++ia;
        ++ib;
      }
    }
  }
  return tri;
}

double avg_clustering_coefficient(const AttributedGraph& g) {
  const int n = g.num_nodes();
  if (n < 1) throw InvalidArgument("clustering of empty graph");
  const auto tri = triangles_per_node(g);
  std::vector<double> local(n, 0.0);
  for (int v = 0; v < n; ++v) {
    const double d = g.degree(v);
    if (d >= 2) local[v] = 2.0 * static_cast<double>(tri[v]) / (d * (d - 1));
  }
  // summation order fixed by value so relabeling cannot change the result
  std::sort(local.begin(), local.end());
  double sum = 0.0;
  for (double c : local) sum += c;
  return sum / n;
}

Json to_json(const AttributedGraph& g) {
  Json edges = Json::array();
  for (const auto& e : g.edges()) edges.push_back({e.u, e.v});
  Json features = Json::array();
  for (int i = 0; i < g.num_nodes(); ++i) {
    Json row = Json::array();
    for (int c = 0; c < g.feature_dim(); ++c) row.push_back(g.features()(i, c));
    features.push_back(std::move(row));
  }
  Json out;
  out["num_nodes"] = g.num_nodes();
  out["edges"] = std::move(edges);
  out["features"] = std::move(features);
  out["labels"] = g.labels();
  return out;
}

AttributedGraph graph_from_json(const Json& j) {
  try {
    const int n = j.at("num_nodes").get<int>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      if (e.size() != 2) throw InvalidGraph("edge must be a pair");
      edges.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    Eigen::MatrixXd features;
    if (j.contains("features") && !j["features"].empty()) {
      const auto& rows = j["features"];
      const auto d = rows[0].size();
      features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != d) throw InvalidGraph("ragged feature rows");
        for (std::size_t c = 0; c < d; ++c)
          features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
              rows[i][c].get<double>();
      }
    }
    std::vector<int> labels;
    if (j.contains("labels")) labels = j["labels"].get<std::vector<int>>();
    return AttributedGraph(n, std::move(edges), std::move(features), std::move(labels));
  } catch (const Json::exception& e) {
    throw InvalidGraph(std::string("malformed graph JSON: ") + e.what());
  }
}

}  // namespace graphpop
