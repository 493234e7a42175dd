#pragma once

// Brute-force reference implementations shared by the unit tests and the
// acceptance binary. Each one is written from the definition, not from the
// library code it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graphpop/autodiff.hpp"
#include "graphpop/explorer.hpp"
#include "graphpop/graph.hpp"
#include "graphpop/hyperconfig.hpp"
#include "graphpop/records.hpp"
#include "graphpop/rng.hpp"

namespace oracle {

using graphpop::AttributedGraph;
using graphpop::Edge;

inline bool is_paw(const std::vector<Edge>& es) {
  std::map<int, int> deg;
  for (const auto& e : es) {
    ++deg[e.u];
    ++deg[e.v];
  }
  if (deg.size() != 4) return false;
  std::vector<int> d;
  for (auto [v, c] : deg) d.push_back(c);
  std::sort(d.begin(), d.end());
  return d == std::vector<int>{1, 2, 2, 3};
}

/// Counts 4-edge subgraphs isomorphic to a triangle with one pendant edge by
/// enumerating every 4-vertex subset and every 4-edge subset inside it.
inline std::int64_t tailed_triangles(const AttributedGraph& g) {
  const int n = g.num_nodes();
  std::int64_t count = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int d = c + 1; d < n; ++d) {
          const int vs[4] = {a, b, c, d};
          std::vector<Edge> inside;
          for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
              if (g.has_edge(vs[i], vs[j])) inside.push_back({vs[i], vs[j]});
          const int m = static_cast<int>(inside.size());
          for (int mask = 0; mask < (1 << m); ++mask) {
            if (__builtin_popcount(mask) != 4) continue;
            std::vector<Edge> pick;
            for (int i = 0; i < m; ++i)
              if (mask >> i & 1) pick.push_back(inside[i]);
            count += is_paw(pick);
          }
        }
  return count;
}

/// Pair-counting definition of ROC-AUC.
inline double auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0;
  long pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (y[i] && !y[j]) {
        ++pairs;
        wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
  return wins / static_cast<double>(pairs);
}

/// Textbook one-way ANOVA in long double.
inline double anova(const std::vector<std::vector<double>>& groups) {
  long double total = 0, n = 0;
  for (const auto& g : groups)
    for (double x : g) {
      total += x;
      n += 1;
    }
  const long double grand = total / n;
  long double ssb = 0, ssw = 0;
  int k = 0;
  for (const auto& g : groups) {
    if (g.empty()) continue;
    ++k;
    long double m = 0;
    for (double x : g) m += x;
    m /= g.size();
    ssb += g.size() * (m - grand) * (m - grand);
    for (double x : g) ssw += (x - m) * (x - m);
  }
  return static_cast<double>((ssb / (k - 1)) / (ssw / (n - k)));
}

/// Sort each location's finite metrics best-first; a model's rank is one
/// plus its first position in that order.
inline std::map<graphpop::ModelTag, double> mrr(const std::vector<graphpop::ResultRecord>& log) {
  std::map<int, std::vector<std::pair<double, graphpop::ModelTag>>> by_k;
  std::map<int, bool> lower_better;
  for (const auto& r : log)
    if (r.model && r.metric && std::isfinite(r.metric->value)) {
      by_k[r.location].emplace_back(r.metric->value, *r.model);
      lower_better[r.location] = r.metric->kind == graphpop::MetricKind::SCALED_MSE;
    }
  std::map<graphpop::ModelTag, std::pair<double, int>> acc;
  for (auto& [k, v] : by_k) {
    if (v.size() < 2) continue;
    std::vector<double> sorted;
    for (auto& [val, tag] : v) sorted.push_back(lower_better[k] ? -val : val);
    std::sort(sorted.rbegin(), sorted.rend());
    for (auto& [val, tag] : v) {
      const double key = lower_better[k] ? -val : val;
      const auto pos = std::find(sorted.begin(), sorted.end(), key) - sorted.begin();
      acc[tag].first += 1.0 / static_cast<double>(pos + 1);
      acc[tag].second += 1;
    }
  }
  std::map<graphpop::ModelTag, double> out;
  for (auto& [tag, a] : acc) out[tag] = a.first / a.second;
  return out;
}

/// Group ok finite records of `tag` by canonical config, average, and keep
/// the best mean; ties go to the smaller canonical string.
inline std::string best_config(const std::vector<graphpop::ResultRecord>& log,
                               graphpop::ModelTag tag) {
  std::map<std::string, std::pair<long double, int>> groups;
  bool lower_better = false;
  for (const auto& r : log) {
    if (r.model != tag || r.status != graphpop::RecordStatus::Ok || !r.metric ||
        !std::isfinite(r.metric->value))
      continue;
    lower_better = r.metric->kind == graphpop::MetricKind::SCALED_MSE;
    auto& [sum, count] = groups[r.hyper.canonical()];
    sum += r.metric->value;
    ++count;
  }
  std::string best;
  long double best_mean = 0;
  for (const auto& [key, g] : groups) {  // map order = ascending canonical string
    const long double mean = g.first / g.second;
    if (best.empty() || (lower_better ? mean < best_mean : mean > best_mean)) {
      best = key;
      best_mean = mean;
    }
  }
  return best;
}

/// Solves the 2x2 normal equations [n sx; sx sxx] b = [sy; sxy] in long double.
inline std::pair<double, double> ols(const std::vector<double>& x, const std::vector<double>& y) {
  long double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    n += 1;
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double det = n * sxx - sx * sx;
  const long double b0 = (sxx * sy - sx * sxy) / det;
  const long double b1 = (n * sxy - sx * sy) / det;
  return {static_cast<double>(b0), static_cast<double>(b1)};
}

/// z = sin(pi2) when pi1 > 0.5, else 0, plus N(0, noise); pi3 is inert.
inline graphpop::WorldTable gated_table(graphpop::Rng& rng, int rows, double noise) {
  std::uniform_real_distribution<double> u(0, 1), angle(0, 2 * std::numbers::pi);
  std::normal_distribution<double> eps(0, noise);
  Eigen::MatrixXd values(rows, 3);
  Eigen::VectorXd z(rows);
  for (int r = 0; r < rows; ++r) {
    values(r, 0) = u(rng);
    values(r, 1) = angle(rng);
    values(r, 2) = u(rng);
    z[r] = (values(r, 0) > 0.5 ? std::sin(values(r, 1)) : 0.0) + eps(rng);
  }
  return graphpop::make_world_table({"p_q_ratio", "avg_degree", "power_exponent"}, values, z);
}

using LossFn = std::function<graphpop::ad::Var(graphpop::ad::Tape<double>&,
                                               std::span<const graphpop::ad::Var>)>;

struct GradientComparison {
  std::vector<Eigen::MatrixXd> analytic;
  std::vector<Eigen::MatrixXd> numeric;

  /// ||a - n|| / (||a|| + ||n||) over all entries.
  double relative_error() const {
    double diff = 0, a = 0, n = 0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      diff += (analytic[i] - numeric[i]).squaredNorm();
      a += analytic[i].squaredNorm();
      n += numeric[i].squaredNorm();
    }
    const double scale = std::sqrt(a) + std::sqrt(n);
    return scale > 0 ? std::sqrt(diff) / scale : 0.0;
  }
};

/// Tape gradients next to central differences with step h.
inline GradientComparison compare_gradients(std::vector<Eigen::MatrixXd> params,
                                            const LossFn& loss, double h = 1e-6) {
  auto run = [&](const std::vector<Eigen::MatrixXd>& ps,
                 std::vector<Eigen::MatrixXd>* grads) {
    graphpop::ad::Tape<double> t;
    std::vector<graphpop::ad::Var> vars;
    for (const auto& p : ps) vars.push_back(t.variable(p));
    const graphpop::ad::Var l = loss(t, vars);
    if (grads) {
      t.backward(l);
      for (auto v : vars) grads->push_back(t.grad(v));
    }
    return t.value(l)(0, 0);
  };
  GradientComparison out;
  run(params, &out.analytic);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Eigen::MatrixXd num(params[i].rows(), params[i].cols());
    for (Eigen::Index r = 0; r < params[i].rows(); ++r)
      for (Eigen::Index c = 0; c < params[i].cols(); ++c) {
        const double keep = params[i](r, c);
        params[i](r, c) = keep + h;
        const double up = run(params, nullptr);
        params[i](r, c) = keep - h;
        const double down = run(params, nullptr);
        params[i](r, c) = keep;
        num(r, c) = (up - down) / (2 * h);
      }
    out.numeric.push_back(std::move(num));
  }
  return out;
}

/// Zero biases put ReLU inputs exactly on the kink; move them off it.
inline std::vector<Eigen::MatrixXd> jitter(std::vector<Eigen::MatrixXd> params,
                                           graphpop::Rng& rng) {
  std::normal_distribution<double> z(0.0, 0.3);
  for (auto& p : params)
    for (auto& x : p.reshaped()) x += z(rng);
  return params;
}

}  // namespace oracle
