#include "graphpop/hyperopt.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>

#include "graphpop/errors.hpp"

namespace graphpop {

HyperSpace default_hyper_space(ModelTag tag) {
  HyperSpace space;
  for (auto axis : applicable_axes(tag)) space.axes.emplace_back(axis, grid_values(axis));
  return space;
}

void validate_for(const HyperSpace& space, ModelTag tag) {
  const auto wanted = applicable_axes(tag);
  const std::string model(to_string(tag));
  HyperConfig base;
  for (const auto& [axis, values] : space.axes) {
    if (std::find(wanted.begin(), wanted.end(), axis) == wanted.end())
      throw ConfigError(model + " does not use hyperparameter " + std::string(to_string(axis)));
    if (values.empty())
      throw ConfigError("empty value list for " + std::string(to_string(axis)));
    base.set(axis, values.front());
  }
  for (auto axis : wanted) {
    const bool present = std::any_of(space.axes.begin(), space.axes.end(),
                                     [&](const auto& a) { return a.first == axis; });
    if (!present) throw ConfigError(model + " needs hyperparameter " + std::string(to_string(axis)));
  }
  for (const auto& [axis, values] : space.axes)
    for (double v : values) {
      if (is_integer_axis(axis) && v != std::floor(v))
        throw ConfigError("hyperparameter " + std::string(to_string(axis)) +
                          " must be an integer");
      HyperConfig probe = base;
      probe.set(axis, v);
      validate_for(probe, tag);
    }
}

Json to_json(const HyperSpace& space) {
  Json j = Json::object();
  for (const auto& [axis, values] : space.axes) {
    Json list = Json::array();
    for (double v : values) {
      if (is_integer_axis(axis))
        list.push_back(static_cast<std::int64_t>(std::llround(v)));
      else
        list.push_back(v);
    }
    j[std::string(to_string(axis))] = std::move(list);
  }
  return j;
}

HyperSpace hyper_space_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("hyper_space must be an object");
  HyperSpace space;
  for (const auto& [name, list] : j.items()) {
    const auto axis = hyper_axis_from_string(name);
    if (!list.is_array()) throw ConfigError("hyper_space entry '" + name + "' must be a list");
    std::vector<double> values;
    for (const auto& v : list) {
      if (!v.is_number()) throw ConfigError("hyper_space entry '" + name + "' must be numeric");
      values.push_back(v.get<double>());
    }
    space.axes.emplace_back(axis, std::move(values));
  }
  std::stable_sort(space.axes.begin(), space.axes.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  return space;
}

HyperConfig draw_hyperconfig(const HyperSpace& space, Rng& rng) {
  HyperConfig cfg;
  for (const auto& [axis, values] : space.axes) {
    if (values.empty()) throw ConfigError("empty value list for " + std::string(to_string(axis)));
    std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
    cfg.set(axis, values[pick(rng)]);
  }
  return cfg;
}

HyperConfig select_best_config(std::span<const ResultRecord> records, ModelTag tag) {
  struct Group {
    HyperConfig config;
    std::vector<double> values;
  };
  std::map<std::string, Group> groups;
  std::optional<MetricKind> kind;
  for (const auto& r : records) {
    if (r.model != tag || !r.has_finite_metric()) continue;
    auto& g = groups[r.hyper.canonical()];
    g.config = r.hyper;
    g.values.push_back(r.metric->value);
    kind = r.metric->kind;
  }
  if (groups.empty())
    throw NoRecords("no finite records for " + std::string(to_string(tag)));

  const HyperConfig* best = nullptr;
  double best_mean = 0;
  // map order = canonical order, so strict improvement keeps the smallest on ties
  for (auto& [key, g] : groups) {
    std::sort(g.values.begin(), g.values.end());
    double sum = 0;
    for (double v : g.values) sum += v;
    const double mean = sum / static_cast<double>(g.values.size());
    if (best == nullptr || better(*kind, mean, best_mean)) {
      best = &g.config;
      best_mean = mean;
    }
  }
  return *best;
}

TuneResult tune_with_budget(ModelTag tag, const HyperSpace& space, const TaskDataset& dataset,
                            int rounds, Rng& rng, const TrainOptions& options) {
  if (rounds < 1) throw InvalidArgument("tuning needs at least one round");
  const bool tunable = !applicable_axes(tag).empty();
  const int budget = tunable ? rounds : 1;
  const MetricKind kind = metric_of(task_of(dataset));

  std::optional<TrainedModel> best_model;
  TuneResult result;
  // baselines ignore the training seed, so a repeated config repeats its score
  std::map<std::string, double> seen;

  for (int round = 0; round < budget; ++round) {
    const HyperConfig cfg = draw_hyperconfig(space, rng);
    const std::uint64_t seed = rng();
    if (!is_neural(tag) && seen.contains(cfg.canonical())) continue;
    try {
      TrainedModel model = train_model(tag, cfg, dataset, seed, options);
      const MetricValue tune = evaluate(model, dataset, Split::Tune);
      if (!is_neural(tag)) seen[cfg.canonical()] = tune.value;
      if (!std::isfinite(tune.value)) {
        ++result.failed_rounds;
        continue;
      }
      if (!best_model || better(kind, tune.value, result.tune.value)) {
        best_model = std::move(model);
        result.config = cfg;
        result.tune = tune;
        result.best_round = round;
      }
    } catch (const Error&) {
      ++result.failed_rounds;
    }
  }
  if (!best_model)
    throw AllRoundsFailed("all " + std::to_string(budget) + " tuning rounds failed for " +
                          std::string(to_string(tag)));
  result.test = evaluate(*best_model, dataset, Split::Test);
  return result;
}

}  // namespace graphpop
