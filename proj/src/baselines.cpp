#include <algorithm>
#include <cmath>
#include <string>

#include "graphpop/errors.hpp"
#include "graphpop/models.hpp"

namespace graphpop {

const std::vector<HeuristicScheme>& all_heuristic_schemes() {
  static const std::vector<HeuristicScheme> schemes = {
      HeuristicScheme::SORENSEN_DICE,  HeuristicScheme::COSINE,
      HeuristicScheme::HUB_PROMOTED,   HeuristicScheme::HUB_SUPPRESSED,
      HeuristicScheme::JACCARD,        HeuristicScheme::ADAMIC_ADAR,
      HeuristicScheme::RESOURCE_ALLOCATION, HeuristicScheme::LEICHT_HOLME_NEWMAN};
  return schemes;
}

std::string_view to_string(HeuristicScheme scheme) {
  switch (scheme) {
    case HeuristicScheme::SORENSEN_DICE: return "SORENSEN_DICE";
    case HeuristicScheme::COSINE: return "COSINE";
    case HeuristicScheme::HUB_PROMOTED: return "HUB_PROMOTED";
    case HeuristicScheme::HUB_SUPPRESSED: return "HUB_SUPPRESSED";
    case HeuristicScheme::JACCARD: return "JACCARD";
    case HeuristicScheme::ADAMIC_ADAR: return "ADAMIC_ADAR";
    case HeuristicScheme::RESOURCE_ALLOCATION: return "RESOURCE_ALLOCATION";
    case HeuristicScheme::LEICHT_HOLME_NEWMAN: return "LEICHT_HOLME_NEWMAN";
  }
  return "?";
}

HeuristicScheme heuristic_scheme_from_string(std::string_view name) {
  for (auto s : all_heuristic_schemes())
    if (to_string(s) == name) return s;
  throw ConfigError("unknown heuristic scheme '" + std::string(name) + "'");
}

double lp_heuristic_score(const AttributedGraph& g, int u, int v, HeuristicScheme scheme) {
  if (u == v) throw InvalidArgument("heuristic score needs distinct endpoints");
  const auto nu = g.neighbors(u);
  const auto nv = g.neighbors(v);
  const double du = static_cast<double>(nu.size());
  const double dv = static_cast<double>(nv.size());

  // merge the sorted neighbor lists; sums run in increasing w, so swapping
  // u and v cannot change the result
  double common = 0, aa = 0, ra = 0;
  for (std::size_t i = 0, j = 0; i < nu.size() && j < nv.size();) {
    if (nu[i] < nv[j]) {
      ++i;
    } else if (nv[j] < nu[i]) {
      ++j;
    } else {
      const double dw = g.degree(nu[i]);
      common += 1;
      const double ln = std::log(dw);
      if (ln > 0) aa += 1.0 / ln;
      ra += 1.0 / dw;
      ++i;
      ++j;
    }
  }
  if (common == 0) return 0.0;

  auto ratio = [](double num, double den) { return den > 0 ? num / den : 0.0; };
  switch (scheme) {
    case HeuristicScheme::SORENSEN_DICE: return ratio(2 * common, du + dv);
    case HeuristicScheme::COSINE: return ratio(common, std::sqrt(du * dv));
    case HeuristicScheme::HUB_PROMOTED: return ratio(common, std::min(du, dv));
    case HeuristicScheme::HUB_SUPPRESSED: return ratio(common, std::max(du, dv));
    case HeuristicScheme::JACCARD: return ratio(common, du + dv - common);
    case HeuristicScheme::ADAMIC_ADAR: return aa;
    case HeuristicScheme::RESOURCE_ALLOCATION: return ra;
    case HeuristicScheme::LEICHT_HOLME_NEWMAN: return ratio(common, du * dv);
  }
  return 0.0;
}

Eigen::VectorXd ppr_scores(const AttributedGraph& g, std::span<const int> seeds, double alpha) {
  const int n = g.num_nodes();
  if (seeds.empty()) throw InvalidArgument("PPR needs at least one seed node");
  if (!(alpha > 0 && alpha < 1)) throw InvalidArgument("PPR restart probability must be in (0, 1)");
  Eigen::VectorXd restart = Eigen::VectorXd::Zero(n);
  for (int s : seeds) {
    if (s < 0 || s >= n) throw InvalidArgument("PPR seed out of range");
    restart[s] += 1.0;
  }
  restart /= restart.sum();

  Eigen::VectorXd pi = restart;
  Eigen::VectorXd next(n);
  for (int iter = 0; iter < 1000; ++iter) {
    next.setZero();
    double dangling = 0;
    for (int v = 0; v < n; ++v) {
      const int d = g.degree(v);
      if (d == 0) {
        dangling += pi[v];
        continue;
      }
      const double share = pi[v] / d;
      for (int w : g.neighbors(v)) next[w] += share;
    }
    next = alpha * restart + (1 - alpha) * (next + dangling * restart);
    const double change = (next - pi).lpNorm<1>();
    pi.swap(next);
    if (change < 1e-9) break;
  }
  return pi;
}

Eigen::MatrixXd ppr_class_masses(const AttributedGraph& g, std::span<const int> train,
                                 double alpha) {
  const int k = g.num_classes();
  std::vector<std::vector<int>> seeds(k);
  for (int v : train) seeds[g.labels()[v]].push_back(v);
  Eigen::MatrixXd masses(g.num_nodes(), k);
  for (int c = 0; c < k; ++c) {
    if (seeds[c].empty())
      throw InvalidArgument("class " + std::to_string(c) + " has no training node");
    masses.col(c) = ppr_scores(g, seeds[c], alpha);
  }
  return masses;
}

std::vector<int> ppr_classify(const AttributedGraph& g, std::span<const int> train,
                              double alpha) {
  const Eigen::MatrixXd masses = ppr_class_masses(g, train, alpha);
  std::vector<int> out(g.num_nodes());
  for (int v = 0; v < g.num_nodes(); ++v) {
    Eigen::Index best = 0;
    masses.row(v).maxCoeff(&best);
    out[v] = static_cast<int>(best);
  }
  return out;
}

namespace {

double scheme_auc(const LpDataset& ds, Split split, HeuristicScheme scheme) {
  const auto& pos = ds.positives(split);
  const auto& neg = ds.negatives(split);
  std::vector<double> scores;
  std::vector<int> labels;
  scores.reserve(pos.size() + neg.size());
  for (const auto& e : pos) {
    scores.push_back(lp_heuristic_score(ds.train_graph, e.u, e.v, scheme));
    labels.push_back(1);
  }
  for (const auto& e : neg) {
    scores.push_back(lp_heuristic_score(ds.train_graph, e.u, e.v, scheme));
    labels.push_back(0);
  }
  return roc_auc(scores, labels);
}

}  // namespace

HeuristicChoice heuristic_lp_baseline(const LpDataset& dataset) {
  HeuristicChoice choice;
  bool first = true;
  for (auto scheme : all_heuristic_schemes()) {
    const double auc = scheme_auc(dataset, Split::Tune, scheme);
    if (first || auc > choice.tune_auc) {
      choice.scheme = scheme;
      choice.tune_auc = auc;
      first = false;
    }
  }
  choice.test = {MetricKind::AUC_LP, scheme_auc(dataset, Split::Test, choice.scheme)};
  return choice;
}

double edge_density(const AttributedGraph& g) {
  const double n = g.num_nodes();
  if (n < 2) return 0.0;
  return 2.0 * g.num_edges() / (n * (n - 1));
}

OlsFit fit_ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("OLS inputs differ in length");
  if (x.empty()) throw InvalidArgument("OLS needs at least one observation");
  const double m = static_cast<double>(x.size());
  double xbar = 0, ybar = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xbar += x[i];
    ybar += y[i];
  }
  xbar /= m;
  ybar /= m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxy += (x[i] - xbar) * (y[i] - ybar);
  }
  if (!(sxx > 0)) return {ybar, 0.0, true};
  const double slope = sxy / sxx;
  return {ybar - slope * xbar, slope, false};
}

MetricValue linreg_density(const GppDataset& dataset) {
  std::vector<double> x, y;
  for (int i : dataset.train) {
    x.push_back(edge_density(dataset.graphs[i]));
    y.push_back(dataset.targets[i]);
  }
  const OlsFit fit = fit_ols(x, y);
  std::vector<double> preds, targets;
  for (int i : dataset.test) {
    preds.push_back(fit.intercept + fit.slope * edge_density(dataset.graphs[i]));
    targets.push_back(dataset.targets[i]);
  }
  return {MetricKind::SCALED_MSE, scaled_mse(preds, targets)};
}

}  // namespace graphpop
