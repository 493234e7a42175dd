#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "graphpop/generators.hpp"
#include "graphpop/graph.hpp"
#include "graphpop/metrics.hpp"
#include "graphpop/rng.hpp"

namespace graphpop {

enum class Split { Train, Tune, Test };

/// Transductive node classification: one graph, 5-per-class train and tune
/// node sets, everything else is test.
struct NcDataset {
  AttributedGraph graph;
  std::vector<int> train, tune, test;

  const std::vector<int>& nodes(Split split) const;
};

/// Link prediction: the edge set is partitioned 80/10/10; `train_graph`
/// carries only the train edges and is the only graph models may read.
struct LpDataset {
  AttributedGraph graph;
  AttributedGraph train_graph;
  std::vector<Edge> train, tune, test;
  std::vector<Edge> tune_neg, test_neg;

  const std::vector<Edge>& positives(Split split) const;
  const std::vector<Edge>& negatives(Split split) const;
};

/// Graph property prediction over a list of small graphs.
struct GppDataset {
  std::vector<AttributedGraph> graphs;
  std::vector<double> targets;
  std::vector<int> train, tune, test;

  const std::vector<int>& indices(Split split) const;
  std::vector<double> targets_of(Split split) const;
};

using TaskDataset = std::variant<NcDataset, LpDataset, GppDataset>;

Task task_of(const TaskDataset& dataset);
MetricKind metric_of(Task task);

/// Throws SplitInfeasible if some class has fewer than 10 nodes.
NcDataset make_nc_dataset(const AttributedGraph& g, Rng& rng);

/// Throws SplitInfeasible with fewer than 10 edges or too few non-edges.
LpDataset make_lp_dataset(const AttributedGraph& g, Rng& rng);

GppDataset make_gpp_dataset(const GeneratorConfig& cfg, Rng& rng);

/// Generates the world sample for `task` at `cfg` and splits it.
TaskDataset make_dataset(Task task, const GeneratorConfig& cfg, Rng& rng);

/// Statistics logged with every record. Homogeneity is absent without
/// labels, Gini is absent on edgeless graphs.
struct GraphStats {
  double average_degree = 0.0;
  std::optional<double> edge_homogeneity;
  std::optional<double> degree_gini;
  double avg_clustering = 0.0;

  friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

GraphStats compute_stats(const AttributedGraph& g);
/// GPP datasets are measured as the disjoint union of their graphs.
GraphStats compute_stats(const TaskDataset& dataset);

/// Disjoint union, node ids offset in list order.
AttributedGraph disjoint_union(std::span<const AttributedGraph> graphs);

}  // namespace graphpop
