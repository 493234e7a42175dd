#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace graphpop {

using Json = nlohmann::ordered_json;

/// Unordered node pair, stored with u < v once inside a graph.
struct Edge {
  int u = 0;
  int v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected simple graph with per-node features and integer labels.
///
/// Edges are normalized (u < v), sorted and validated on construction; the
/// CSR adjacency index is built at the same time, so a constructed graph is
/// immutable and safe to share between threads.
class AttributedGraph {
 public:
  AttributedGraph() = default;

  /// Throws InvalidGraph on out-of-range endpoints, self-loops, duplicate
  /// pairs, feature rows != num_nodes, or labels of the wrong length.
  AttributedGraph(int num_nodes, std::vector<Edge> edges,
                  Eigen::MatrixXd features = {}, std::vector<int> labels = {});

  int num_nodes() const noexcept { return num_nodes_; }
  int num_edges() const noexcept { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Eigen::MatrixXd& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  bool has_labels() const noexcept { return !labels_.empty(); }
  int feature_dim() const noexcept { return static_cast<int>(features_.cols()); }

  /// Largest label + 1, or 0 without labels.
  int num_classes() const noexcept;

  int degree(int v) const noexcept { return offsets_[v + 1] - offsets_[v]; }
  /// Sorted neighbor list of v.
  std::span<const int> neighbors(int v) const noexcept {
    return {adjacency_.data() + offsets_[v],
            static_cast<std::size_t>(degree(v))};
  }
  bool has_edge(int u, int v) const noexcept;

  AttributedGraph with_edges(std::vector<Edge> edges) const;
  AttributedGraph with_features(Eigen::MatrixXd features) const;
  AttributedGraph with_labels(std::vector<int> labels) const;

  /// Relabels node i as perm[i] across edges, features and labels.
  AttributedGraph permuted(std::span<const int> perm) const;

 private:
  int num_nodes_ = 0;
  std::vector<Edge> edges_;
  Eigen::MatrixXd features_;
  std::vector<int> labels_;
  std::vector<int> offsets_ = {0};
  std::vector<int> adjacency_;
};

double average_degree(const AttributedGraph& g);

/// Fraction of edges whose endpoints share a label. Throws InvalidArgument on
/// an edgeless or unlabeled graph.
double edge_homogeneity(const AttributedGraph& g);

/// Population Gini coefficient of the degree sequence. Throws
/// InvalidArgument if every degree is zero.
double degree_gini(const AttributedGraph& g);

/// Mean local clustering; nodes of degree < 2 contribute 0.
double avg_clustering_coefficient(const AttributedGraph& g);

/// Triangles through each node.
std::vector<std::int64_t> triangles_per_node(const AttributedGraph& g);

Json to_json(const AttributedGraph& g);
AttributedGraph graph_from_json(const Json& j);

}  // namespace graphpop
