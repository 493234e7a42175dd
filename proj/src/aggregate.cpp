#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "graphpop/errors.hpp"
#include "graphpop/explorer.hpp"
#include "graphpop/pipeline.hpp"

namespace graphpop {

std::vector<MrrEntry> aggregate_mrr(std::span<const ResultRecord> records) {
  std::map<int, std::vector<const ResultRecord*>> by_location;
  for (const auto& r : records)
    if (r.model && r.has_finite_metric()) by_location[r.location].push_back(&r);

  std::map<ModelTag, std::pair<double, int>> totals;
  int comparable = 0;
  for (const auto& [k, recs] : by_location) {
    if (recs.size() < 2) continue;
    ++comparable;
    for (const auto* r : recs) {
      int rank = 1;
      for (const auto* other : recs)
        if (better(r->metric->kind, other->metric->value, r->metric->value)) ++rank;
      auto& [sum, count] = totals[*r->model];
      sum += 1.0 / rank;
      ++count;
    }
  }
  if (comparable == 0)
    throw NoComparableLocations("no location has finite metrics for two or more models");
  std::vector<MrrEntry> out;
  for (const auto& [tag, t] : totals) out.push_back({tag, t.first / t.second, t.second});
  return out;
}

namespace {

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

Moments moments(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double sum = 0;
  for (double x : v) sum += x;
  const double mean = sum / n;
  if (v.size() < 2) return {mean, 0.0};
  double sq = 0;
  for (double x : v) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / (n - 1)) / std::sqrt(n)};
}

}  // namespace

std::vector<ModelSummary> summarize(std::span<const ResultRecord> records) {
  std::map<ModelTag, std::vector<double>> values;
  std::map<ModelTag, ModelSummary> out;
  for (const auto& r : records) {
    if (!r.model) continue;
    auto& s = out[*r.model];
    s.model = *r.model;
    if (r.has_finite_metric()) {
      values[*r.model].push_back(r.metric->value);
      s.kind = r.metric->kind;
    } else {
      ++s.failed;
    }
  }
  std::vector<ModelSummary> list;
  for (auto& [tag, s] : out) {
    auto& v = values[tag];
    s.count = static_cast<int>(v.size());
    if (!v.empty()) {
      const auto m = moments(v);
      s.mean = m.mean;
      s.se = m.se;
    } else {
      s.mean = std::nan("");
    }
    list.push_back(s);
  }
  return list;
}

std::optional<double> record_parameter(const ResultRecord& record, const std::string& name) {
  if (auto v = record.config.find(name)) return v;
  if (!record.stats) return std::nullopt;
  if (name == "average_degree") return record.stats->average_degree;
  if (name == "edge_homogeneity") return record.stats->edge_homogeneity;
  if (name == "degree_gini") return record.stats->degree_gini;
  if (name == "avg_clustering") return record.stats->avg_clustering;
  return std::nullopt;
}

std::vector<MarginalRow> marginal_table(std::span<const ResultRecord> records,
                                        const std::string& parameter, int bins) {
  if (bins < 1) throw InvalidArgument("marginal table needs at least one bin");
  // one parameter value per location
  std::map<int, double> location_value;
  bool known = false;
  for (const auto& r : records) {
    if (!r.has_finite_metric() || !r.model) continue;
    const auto v = record_parameter(r, parameter);
    if (!v) continue;
    known = true;
    location_value.emplace(r.location, *v);
  }
  if (!known) throw InvalidArgument("parameter '" + parameter + "' not found in any finite record");

  std::vector<int> locations;
  std::vector<double> values;
  for (const auto& [k, v] : location_value) {
    locations.push_back(k);
    values.push_back(v);
  }
  std::vector<int> bin_of(values.size(), 0);
  if (bins > 1) bin_of = quantile_bins(values, bins);
  std::map<int, int> location_bin;
  for (std::size_t i = 0; i < locations.size(); ++i) location_bin[locations[i]] = bin_of[i];

  std::map<int, std::vector<double>> bin_values;
  for (std::size_t i = 0; i < values.size(); ++i) bin_values[bin_of[i]].push_back(values[i]);

  std::map<std::pair<int, ModelTag>, std::vector<double>> cells;
  for (const auto& r : records) {
    if (!r.has_finite_metric() || !r.model) continue;
    const auto it = location_bin.find(r.location);
    if (it == location_bin.end()) continue;
    cells[{it->second, *r.model}].push_back(r.metric->value);
  }
  std::vector<MarginalRow> out;
  for (const auto& [key, metrics] : cells) {
    const auto m = moments(metrics);
    out.push_back({key.first, moments(bin_values[key.first]).mean, key.second, m.mean, m.se,
                   static_cast<int>(metrics.size())});
  }
  return out;
}

std::string marginal_csv(const std::vector<MarginalRow>& rows) {
  std::string out = "bin,center,model,mean,se,count\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.10g,%s,%.10g,%.10g,%d\n", r.bin, r.center,
                  std::string(to_string(r.model)).c_str(), r.mean, r.se, r.count);
    out += buf;
  }
  return out;
}

}  // namespace graphpop
