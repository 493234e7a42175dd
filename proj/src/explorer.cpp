#include "graphpop/explorer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "graphpop/errors.hpp"

namespace graphpop {

std::vector<double> quantile_edges(std::span<const double> values, int nbins) {
  if (nbins < 2) throw InvalidArgument("quantile binning needs at least two bins");
  if (values.size() < static_cast<std::size_t>(nbins))
    throw TooFewValues("need at least " + std::to_string(nbins) + " values, got " +
                       std::to_string(values.size()));
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  std::vector<double> edges;
  edges.reserve(nbins - 1);
  for (int j = 1; j < nbins; ++j) {
    // smallest order statistic whose ECDF reaches j / nbins
    const std::size_t rank = (static_cast<std::size_t>(j) * n + nbins - 1) / nbins;
    edges.push_back(sorted[rank - 1]);
  }
  return edges;
}

std::vector<int> assign_bins(std::span<const double> edges, std::span<const double> values) {
  std::vector<int> out;
  out.reserve(values.size());
  for (double v : values)
    out.push_back(static_cast<int>(std::lower_bound(edges.begin(), edges.end(), v) - edges.begin()));
  return out;
}

std::vector<int> quantile_bins(std::span<const double> values, int nbins) {
  const auto edges = quantile_edges(values, nbins);
  return assign_bins(edges, values);
}

double f_statistic(const std::vector<std::vector<double>>& groups) {
  std::vector<const std::vector<double>*> used;
  std::size_t total = 0;
  for (const auto& g : groups)
    if (!g.empty()) {
      used.push_back(&g);
      total += g.size();
    }
  const std::size_t k = used.size();
  if (k < 2) throw DegenerateGroups("F statistic needs at least two nonempty groups");
  if (total <= k) throw DegenerateGroups("F statistic needs more observations than groups");

  // centering on one observation keeps a constant response exactly zero
  const double pivot = used.front()->front();
  double grand = 0;
  std::vector<double> means;
  for (const auto* g : used) {
    double s = 0;
    for (double x : *g) s += x - pivot;
    grand += s;
    means.push_back(s / static_cast<double>(g->size()));
  }
  grand /= static_cast<double>(total);

  double ssb = 0, ssw = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double d = means[i] - grand;
    ssb += static_cast<double>(used[i]->size()) * d * d;
    for (double x : *used[i]) {
      const double r = (x - pivot) - means[i];
      ssw += r * r;
    }
  }
  if (ssb == 0) return 0.0;
  if (ssw == 0) return std::numeric_limits<double>::infinity();
  return (ssb / static_cast<double>(k - 1)) / (ssw / static_cast<double>(total - k));
}

WorldTable make_world_table(std::vector<std::string> params, Eigen::MatrixXd values,
                            Eigen::VectorXd z) {
  if (values.rows() != z.size()) throw InvalidArgument("parameter rows and z differ in length");
  if (values.cols() != static_cast<Eigen::Index>(params.size()))
    throw InvalidArgument("parameter columns and names differ");
  WorldTable t;
  t.params = std::move(params);
  t.values = std::move(values);
  t.metrics = z;
  t.z = std::move(z);
  return t;
}

WorldTable world_table_from_records(std::span<const ResultRecord> records) {
  std::map<int, std::vector<const ResultRecord*>> by_location;
  std::vector<ModelTag> models;
  for (const auto& r : records) {
    if (!r.has_finite_metric() || !r.model) continue;
    by_location[r.location].push_back(&r);
    if (std::find(models.begin(), models.end(), *r.model) == models.end())
      models.push_back(*r.model);
  }
  if (by_location.empty()) throw NoRecords("no finite records to explore");
  std::sort(models.begin(), models.end());

  WorldTable t;
  const auto& first = by_location.begin()->second.front()->config;
  for (const auto& [name, v] : first.values()) t.params.push_back(name);
  t.models = models;
  const auto n = static_cast<Eigen::Index>(by_location.size());
  t.values.resize(n, static_cast<Eigen::Index>(t.params.size()));
  t.metrics = Eigen::MatrixXd::Constant(n, static_cast<Eigen::Index>(models.size()),
                                        std::numeric_limits<double>::quiet_NaN());
  t.z.resize(n);
  Eigen::Index row = 0;
  for (const auto& [k, recs] : by_location) {
    const auto& cfg = recs.front()->config;
    for (std::size_t p = 0; p < t.params.size(); ++p)
      t.values(row, static_cast<Eigen::Index>(p)) = cfg.get(t.params[p]);
    for (const auto* r : recs) {
      const auto col = std::find(models.begin(), models.end(), *r->model) - models.begin();
      t.metrics(row, col) = r->metric->value;
    }
    double sum = 0;
    int count = 0;
    for (Eigen::Index c = 0; c < t.metrics.cols(); ++c)
      if (std::isfinite(t.metrics(row, c))) {
        sum += t.metrics(row, c);
        ++count;
      }
    t.z[row] = sum / count;
    ++row;
  }
  return t;
}

namespace {

double median_of(std::vector<double> v, bool integer) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  if (integer) return v[n / 2 - 1];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

AffectiveResult affective_config(const WorldTable& table, int nbins) {
  const Eigen::Index n = table.rows();
  const auto p = static_cast<Eigen::Index>(table.params.size());
  if (n < 1) throw NoRecords("world table is empty");

  // canonical row order so that sums never depend on how rows arrived
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < p; ++c)
      if (table.values(a, c) != table.values(b, c)) return table.values(a, c) < table.values(b, c);
    return table.z[a] < table.z[b];
  });
  std::vector<std::vector<double>> column(p, std::vector<double>(n));
  std::vector<double> z(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < p; ++c) column[c][r] = table.values(order[r], c);
    z[r] = table.z[order[r]];
  }
  std::vector<std::vector<int>> bins(p);
  for (Eigen::Index c = 0; c < p; ++c) bins[c] = quantile_bins(column[c], nbins);

  AffectiveResult result;
  std::vector<std::pair<std::string, double>> chosen;
  for (Eigen::Index i = 0; i < p; ++i) {
    ParameterChoice choice;
    choice.name = table.params[i];
    const bool integer = is_integer_parameter(choice.name);
    for (int x = 0; x < nbins; ++x) {
      double sum = 0;
      int valid = 0;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (j == i) continue;
        std::vector<std::vector<double>> groups(nbins);
        for (Eigen::Index r = 0; r < n; ++r)
          if (bins[i][r] == x) groups[bins[j][r]].push_back(z[r]);
        try {
          const double f = f_statistic(groups);
          if (std::isinf(f)) continue;
          sum += f;
          ++valid;
        } catch (const DegenerateGroups&) {
        }
      }
      choice.bin_scores.push_back(valid > 0 ? std::optional<double>(sum / valid) : std::nullopt);
      if (valid > 0 && (!choice.winning_bin || sum / valid > *choice.bin_scores[*choice.winning_bin]))
        choice.winning_bin = x;
    }
    std::vector<double> pick;
    if (choice.winning_bin) {
      for (Eigen::Index r = 0; r < n; ++r)
        if (bins[i][r] == *choice.winning_bin) pick.push_back(column[i][r]);
    } else {
      choice.fallback = true;
      pick = column[i];
    }
    choice.value = median_of(std::move(pick), integer);
    chosen.emplace_back(choice.name, choice.value);
    result.choices.push_back(std::move(choice));
  }
  result.config = GeneratorConfig(std::move(chosen));
  return result;
}

}  // namespace graphpop
