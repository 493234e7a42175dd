#include "graphpop/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "graphpop/errors.hpp"

namespace graphpop {

namespace {

constexpr int kPerClass = 5;

std::uint64_t pair_key(int u, int v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
}

}  // namespace

const std::vector<int>& NcDataset::nodes(Split split) const {
  switch (split) {
    case Split::Train: return train;
    case Split::Tune: return tune;
    case Split::Test: return test;
  }
  return test;
}

const std::vector<Edge>& LpDataset::positives(Split split) const {
  switch (split) {
    case Split::Train: return train;
    case Split::Tune: return tune;
    case Split::Test: return test;
  }
  return test;
}

const std::vector<Edge>& LpDataset::negatives(Split split) const {
  if (split == Split::Train) throw InvalidArgument("train negatives are resampled per epoch");
  return split == Split::Tune ? tune_neg : test_neg;
}

const std::vector<int>& GppDataset::indices(Split split) const {
  switch (split) {
    case Split::Train: return train;
    case Split::Tune: return tune;
    case Split::Test: return test;
  }
  return test;
}

std::vector<double> GppDataset::targets_of(Split split) const {
  std::vector<double> out;
  for (int i : indices(split)) out.push_back(targets[i]);
  return out;
}

Task task_of(const TaskDataset& dataset) {
  switch (dataset.index()) {
    case 0: return Task::NC;
    case 1: return Task::LP;
    default: return Task::GPP;
  }
}

MetricKind metric_of(Task task) {
  switch (task) {
    case Task::NC: return MetricKind::AUC_OVR;
    case Task::LP: return MetricKind::AUC_LP;
    case Task::GPP: return MetricKind::SCALED_MSE;
  }
  return MetricKind::AUC_OVR;
}

NcDataset make_nc_dataset(const AttributedGraph& g, Rng& rng) {
  if (!g.has_labels()) throw InvalidArgument("node classification needs labels");
  const int k = g.num_classes();
  std::vector<std::vector<int>> members(k);
  for (int v = 0; v < g.num_nodes(); ++v) members[g.labels()[v]].push_back(v);

  NcDataset ds{g, {}, {}, {}};
  std::vector<char> held(g.num_nodes(), 0);
  for (int c = 0; c < k; ++c) {
    auto& m = members[c];
    if (static_cast<int>(m.size()) < 2 * kPerClass)
      throw SplitInfeasible("class " + std::to_string(c) + " has " +
                            std::to_string(m.size()) + " nodes, need 10");
    std::shuffle(m.begin(), m.end(), rng);
    for (int i = 0; i < kPerClass; ++i) {
      ds.train.push_back(m[i]);
      ds.tune.push_back(m[kPerClass + i]);
      held[m[i]] = held[m[kPerClass + i]] = 1;
    }
  }
  std::sort(ds.train.begin(), ds.train.end());
  std::sort(ds.tune.begin(), ds.tune.end());
  for (int v = 0; v < g.num_nodes(); ++v)
    if (!held[v]) ds.test.push_back(v);
  return ds;
}

LpDataset make_lp_dataset(const AttributedGraph& g, Rng& rng) {
  const int m = g.num_edges();
  if (m < 10) throw SplitInfeasible("link prediction needs at least 10 edges");
  const int n_tune = m / 10;
  const int n_test = m / 10;
  const int n_neg = n_tune + n_test;
  const std::int64_t n = g.num_nodes();
  const std::int64_t non_edges = n * (n - 1) / 2 - m;
  if (non_edges < n_neg) throw SplitInfeasible("too few non-edges for negatives");

  std::vector<Edge> shuffled = g.edges();
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  LpDataset ds;
  ds.graph = g;
  ds.tune.assign(shuffled.begin(), shuffled.begin() + n_tune);
  ds.test.assign(shuffled.begin() + n_tune, shuffled.begin() + n_tune + n_test);
  ds.train.assign(shuffled.begin() + n_tune + n_test, shuffled.end());

  std::vector<Edge> negatives;
  negatives.reserve(n_neg);
  if (non_edges >= 4 * static_cast<std::int64_t>(n_neg)) {
    // sparse regime: rejection sampling of distinct non-edges
    std::unordered_set<std::uint64_t> taken;
    std::uniform_int_distribution<int> node(0, static_cast<int>(n) - 1);
    while (static_cast<int>(negatives.size()) < n_neg) {
      const int u = node(rng), v = node(rng);
      if (u == v || g.has_edge(u, v)) continue;
      if (!taken.insert(pair_key(u, v)).second) continue;
      negatives.push_back({std::min(u, v), std::max(u, v)});
    }
  } else {
    std::vector<Edge> pool;
    pool.reserve(static_cast<std::size_t>(non_edges));
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (!g.has_edge(u, v)) pool.push_back({u, v});
    for (int i = 0; i < n_neg; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
      std::swap(pool[i], pool[pick(rng)]);
      negatives.push_back(pool[i]);
    }
  }
  ds.tune_neg.assign(negatives.begin(), negatives.begin() + n_tune);
  ds.test_neg.assign(negatives.begin() + n_tune, negatives.end());
  ds.train_graph = g.with_edges(ds.train);
  return ds;
}

GppDataset make_gpp_dataset(const GeneratorConfig& cfg, Rng& rng) {
  const int count = static_cast<int>(cfg.get_int("ngraphs"));
  const int nv = static_cast<int>(cfg.get_int("num_vertices"));
  const double p = cfg.get("edge_prob");
  const double train_prob = cfg.get("train_prob");
  if (count < 1) throw InvalidArgument("ngraphs must be positive");

  GppDataset ds;
  ds.graphs.reserve(count);
  for (int i = 0; i < count; ++i) {
    ds.graphs.push_back(sample_er_graph(nv, p, rng));
    ds.targets.push_back(static_cast<double>(count_tailed_triangles(ds.graphs.back())));
  }
  const int n_train = static_cast<int>(std::lround(train_prob * count));
  const int n_tune = static_cast<int>(std::lround(0.2 * count));
  if (n_train + n_tune > count) throw InvalidArgument("train and tune splits exceed ngraphs");
  for (int i = 0; i < count; ++i) {
    if (i < n_train)
      ds.train.push_back(i);
    else if (i < n_train + n_tune)
      ds.tune.push_back(i);
    else
      ds.test.push_back(i);
  }
  return ds;
}

TaskDataset make_dataset(Task task, const GeneratorConfig& cfg, Rng& rng) {
  switch (task) {
    case Task::NC: return make_nc_dataset(sample_attributed_sbm(cfg, rng), rng);
    case Task::LP: return make_lp_dataset(sample_attributed_sbm(cfg, rng), rng);
    case Task::GPP: return make_gpp_dataset(cfg, rng);
  }
  throw InvalidArgument("unknown task");
}

GraphStats compute_stats(const AttributedGraph& g) {
  GraphStats s;
  s.average_degree = average_degree(g);
  if (g.num_edges() > 0) {
    if (g.has_labels()) s.edge_homogeneity = edge_homogeneity(g);
    s.degree_gini = degree_gini(g);
  }
  s.avg_clustering = avg_clustering_coefficient(g);
  return s;
}

GraphStats compute_stats(const TaskDataset& dataset) {
  if (const auto* nc = std::get_if<NcDataset>(&dataset)) return compute_stats(nc->graph);
  if (const auto* lp = std::get_if<LpDataset>(&dataset)) return compute_stats(lp->graph);
  const auto& gpp = std::get<GppDataset>(dataset);
  return compute_stats(disjoint_union(gpp.graphs));
}

AttributedGraph disjoint_union(std::span<const AttributedGraph> graphs) {
  int n = 0, d = 0;
  for (const auto& g : graphs) {
    n += g.num_nodes();
    d = std::max(d, g.feature_dim());
  }
  std::vector<Edge> edges;
  Eigen::MatrixXd features = Eigen::MatrixXd::Zero(n, d);
  int offset = 0;
  for (const auto& g : graphs) {
    for (const auto& e : g.edges()) edges.push_back({e.u + offset, e.v + offset});
    if (g.feature_dim() > 0)
      features.block(offset, 0, g.num_nodes(), g.feature_dim()) = g.features();
    offset += g.num_nodes();
  }
  return AttributedGraph(n, std::move(edges), std::move(features));
}

}  // namespace graphpop
