#include <doctest.h>

#include <algorithm>
#include <set>

#include "graphpop/errors.hpp"
#include "graphpop/tasks.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace graphpop;

namespace {

AttributedGraph labelled_blocks(int k, int per, Rng& rng) {
  std::vector<int> labels;
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < per; ++i) labels.push_back(c);
  auto g = support::random_graph(k * per, 0.1, rng);
  return g.with_labels(labels);
}

GeneratorConfig gpp_config(int ngraphs, int nv, double p, double train) {
  return GeneratorConfig(
      {{"ngraphs", ngraphs}, {"num_vertices", nv}, {"edge_prob", p}, {"train_prob", train}});
}

}  // namespace

TEST_CASE("ROC-AUC examples") {
  CHECK(roc_auc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<int>{0, 0, 1, 1}) ==
        doctest::Approx(0.75));
  CHECK(roc_auc(std::vector<double>{1, 2, 3, 4}, std::vector<int>{0, 0, 1, 1}) == 1.0);
  CHECK(roc_auc(std::vector<double>{4, 3, 2, 1}, std::vector<int>{0, 0, 1, 1}) == 0.0);
  CHECK(roc_auc(std::vector<double>{0.5, 0.5, 0.5}, std::vector<int>{1, 0, 1}) == 0.5);
  CHECK_THROWS_AS(roc_auc(std::vector<double>{1, 2}, std::vector<int>{1, 1}), DegenerateLabels);
  CHECK_THROWS_AS(roc_auc(std::vector<double>{1, 2}, std::vector<int>{1}), InvalidArgument);
}

TEST_CASE("ROC-AUC matches pair counting, is rank-invariant and flips") {
  Rng rng(3);
  std::uniform_int_distribution<int> len(2, 40), level(0, 5), bit(0, 1);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = len(rng);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) {
      s[i] = level(rng) * 0.25;  // coarse grid forces ties
      y[i] = bit(rng);
    }
    y[0] = 1;
    y[1] = 0;
    const double a = roc_auc(s, y);
    CHECK(a == doctest::Approx(oracle::auc(s, y)).epsilon(1e-12));
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
    std::vector<double> mono(n), neg(n);
    for (int i = 0; i < n; ++i) {
      mono[i] = std::exp(3 * s[i]) - 7;
      neg[i] = -s[i];
    }
    CHECK(roc_auc(mono, y) == doctest::Approx(a).epsilon(1e-12));
    CHECK(roc_auc(neg, y) == doctest::Approx(1 - a).epsilon(1e-12));
  }
}

TEST_CASE("one-vs-rest AUC averages classes present") {
  Eigen::MatrixXd perfect(4, 3);
  perfect << 1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1;
  std::vector<int> labels{0, 0, 1, 2};
  CHECK(roc_auc_ovr(perfect, labels) == 1.0);

  // class 2 absent: only classes 0 and 1 are averaged
  Eigen::MatrixXd s(4, 3);
  s << 0.9, 0.1, 0.3, 0.2, 0.8, 0.3, 0.6, 0.4, 0.3, 0.3, 0.7, 0.3;
  std::vector<int> y{0, 1, 0, 1};
  const double expect = 0.5 * (oracle::auc({0.9, 0.2, 0.6, 0.3}, {1, 0, 1, 0}) +
                               oracle::auc({0.1, 0.8, 0.4, 0.7}, {0, 1, 0, 1}));
  CHECK(roc_auc_ovr(s, y) == doctest::Approx(expect));
  CHECK_THROWS_AS(roc_auc_ovr(s, std::vector<int>{1, 1, 1, 1}), DegenerateLabels);
}

TEST_CASE("scaled MSE") {
  std::vector<double> y{1, 2, 3, 4};
  CHECK(scaled_mse(y, y) == 0.0);
  CHECK(scaled_mse(mean_predictions(std::span<const double>(y)), y) == doctest::Approx(1.0));
  CHECK(scaled_mse(std::vector<double>{2, 2, 2, 2}, y) == doctest::Approx(6.0 / 5.0));
  CHECK_THROWS_AS(scaled_mse(std::vector<double>{1, 1}, std::vector<double>{3, 3}),
                  DegenerateTargets);
  CHECK_THROWS_AS(scaled_mse(std::vector<double>{1}, std::vector<double>{3}), DegenerateTargets);

  Rng rng(5);
  std::normal_distribution<double> z;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> targets(20), preds(20);
    for (int i = 0; i < 20; ++i) {
      targets[i] = z(rng) * 3 + 1;
      preds[i] = z(rng);
    }
    // invariant to a common affine change of predictions and targets
    std::vector<double> t2(20), p2(20);
    for (int i = 0; i < 20; ++i) {
      t2[i] = 4 * targets[i] - 9;
      p2[i] = 4 * preds[i] - 9;
    }
    CHECK(scaled_mse(p2, t2) == doctest::Approx(scaled_mse(preds, targets)).epsilon(1e-10));
    CHECK(scaled_mse(mean_predictions(std::span<const double>(targets)), targets) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("node classification split") {
  Rng rng(8);
  const auto g = labelled_blocks(3, 20, rng);
  const auto ds = make_nc_dataset(g, rng);
  CHECK(ds.train.size() == 15);
  CHECK(ds.tune.size() == 15);
  CHECK(ds.test.size() == 30);
  std::set<int> all;
  for (Split s : {Split::Train, Split::Tune, Split::Test})
    for (int v : ds.nodes(s)) CHECK(all.insert(v).second);
  CHECK(all.size() == 60);
  for (const auto* part : {&ds.train, &ds.tune}) {
    std::vector<int> per(3, 0);
    for (int v : *part) ++per[g.labels()[v]];
    CHECK(per == std::vector<int>{5, 5, 5});
  }
  Rng a(1), b(1);
  CHECK(make_nc_dataset(g, a).train == make_nc_dataset(g, b).train);

  auto small = labelled_blocks(2, 10, rng).with_labels(
      std::vector<int>{0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
  CHECK_THROWS_AS(make_nc_dataset(small, rng), SplitInfeasible);
}

TEST_CASE("link prediction split") {
  Rng rng(10);
  for (double density : {0.05, 0.3, 0.85}) {
    const auto g = support::random_graph(40, density, rng);
    const auto ds = make_lp_dataset(g, rng);
    const auto m = static_cast<std::size_t>(g.num_edges());
    CHECK(ds.tune.size() == m / 10);
    CHECK(ds.test.size() == m / 10);
    CHECK(ds.train.size() == m - 2 * (m / 10));
    std::set<Edge> seen;
    for (Split s : {Split::Train, Split::Tune, Split::Test})
      for (const auto& e : ds.positives(s)) CHECK(seen.insert(e).second);
    CHECK(seen == std::set<Edge>(g.edges().begin(), g.edges().end()));

    CHECK(ds.tune_neg.size() == ds.tune.size());
    CHECK(ds.test_neg.size() == ds.test.size());
    std::set<Edge> negs;
    for (Split s : {Split::Tune, Split::Test})
      for (const auto& e : ds.negatives(s)) {
        CHECK(e.u < e.v);
        CHECK_FALSE(g.has_edge(e.u, e.v));
        CHECK(negs.insert(e).second);
      }
    // the training graph holds exactly the train edges
    CHECK(ds.train_graph.num_edges() == static_cast<int>(ds.train.size()));
    for (const auto& e : ds.tune) CHECK_FALSE(ds.train_graph.has_edge(e.u, e.v));
    for (const auto& e : ds.test) CHECK_FALSE(ds.train_graph.has_edge(e.u, e.v));
    CHECK(ds.train_graph.features() == g.features());
  }
  CHECK_THROWS_AS(make_lp_dataset(support::make_graph(5, {{0, 1}, {1, 2}}), rng), SplitInfeasible);
  CHECK_THROWS_AS(make_lp_dataset(support::random_graph(5, 1.0, rng), rng), SplitInfeasible);
}

TEST_CASE("graph property prediction dataset") {
  Rng rng(11);
  const auto ds = make_gpp_dataset(gpp_config(100, 12, 0.4, 0.5), rng);
  CHECK(ds.graphs.size() == 100);
  CHECK(ds.train.size() == 50);
  CHECK(ds.tune.size() == 20);
  CHECK(ds.test.size() == 30);
  for (std::size_t i = 0; i < ds.graphs.size(); ++i) {
    CHECK(ds.graphs[i].num_nodes() == 12);
    CHECK(ds.targets[i] == static_cast<double>(count_tailed_triangles(ds.graphs[i])));
  }
  CHECK(ds.targets_of(Split::Tune).size() == 20);

  const auto odd = make_gpp_dataset(gpp_config(101, 5, 0.3, 0.37), rng);
  CHECK(odd.train.size() == 37);
  CHECK(odd.tune.size() == 20);
  CHECK(odd.train.size() + odd.tune.size() + odd.test.size() == 101);
}

TEST_CASE("dataset statistics") {
  Rng rng(12);
  const auto g = labelled_blocks(2, 15, rng);
  const auto s = compute_stats(g);
  CHECK(s.average_degree == average_degree(g));
  CHECK(s.edge_homogeneity.has_value());
  CHECK(s.degree_gini.has_value());

  const auto empty = compute_stats(support::make_graph(4, {}));
  CHECK(empty.average_degree == 0.0);
  CHECK_FALSE(empty.edge_homogeneity.has_value());
  CHECK_FALSE(empty.degree_gini.has_value());

  const TaskDataset gpp = make_gpp_dataset(gpp_config(20, 6, 0.5, 0.4), rng);
  const auto& gs = std::get<GppDataset>(gpp).graphs;
  const auto u = disjoint_union(gs);
  CHECK(u.num_nodes() == 120);
  int edges = 0;
  for (const auto& h : gs) edges += h.num_edges();
  CHECK(u.num_edges() == edges);
  const auto st = compute_stats(gpp);
  CHECK(st.average_degree == doctest::Approx(2.0 * edges / 120));
  CHECK_FALSE(st.edge_homogeneity.has_value());
  CHECK(task_of(gpp) == Task::GPP);
  CHECK(metric_of(Task::GPP) == MetricKind::SCALED_MSE);
}
