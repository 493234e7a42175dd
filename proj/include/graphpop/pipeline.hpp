#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graphpop/generators.hpp"
#include "graphpop/hyperconfig.hpp"
#include "graphpop/hyperopt.hpp"
#include "graphpop/models.hpp"
#include "graphpop/records.hpp"

namespace graphpop {

/// A roster entry: Mode 1 and 3 read `hyper_space` (the published grid when
/// absent), Mode 2 reads `hyper_config`.
struct ModelEntry {
  ModelTag tag = ModelTag::MLP;
  std::optional<HyperSpace> hyper_space;
  std::optional<HyperConfig> hyper_config;

  HyperSpace space() const { return hyper_space.value_or(default_hyper_space(tag)); }

  friend bool operator==(const ModelEntry&, const ModelEntry&) = default;
};

struct RunConfig {
  Task task = Task::NC;
  int mode = 1;
  int n_samples = 1;
  std::uint64_t world_seed = 0;
  int workers = 1;
  ParamSpace param_space = default_param_space(Task::NC);
  /// With a fixed config every location uses it, except that
  /// `varied_parameter` (if set) is drawn from `param_space` per location.
  std::optional<GeneratorConfig> fixed_config;
  std::optional<std::string> varied_parameter;
  std::vector<ModelEntry> models;
  int tuning_rounds = 100;
  std::string output_path;
  TrainOptions train;  ///< not serialized

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;

  friend bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.task == b.task && a.mode == b.mode && a.n_samples == b.n_samples &&
           a.world_seed == b.world_seed && a.workers == b.workers &&
           a.param_space == b.param_space && a.fixed_config == b.fixed_config &&
           a.varied_parameter == b.varied_parameter && a.models == b.models &&
           a.tuning_rounds == b.tuning_rounds && a.output_path == b.output_path;
  }
};

/// Roster with default grids for `task`.
std::vector<ModelEntry> default_models(Task task);

Json to_json(const RunConfig& cfg);
/// Missing keys take defaults; unknown keys are rejected.
RunConfig run_config_from_json(const Json& j);
RunConfig read_run_config(const std::string& path);
void write_run_config(const std::string& path, const RunConfig& cfg);

/// Mode-2 manifest: one {tag, hyper_config} per model.
Json manifest_json(const std::vector<ModelEntry>& models);
std::vector<ModelEntry> manifest_from_json(const Json& j);

/// Best config per model present in the log.
std::vector<ModelEntry> best_config_manifest(std::span<const ResultRecord> records);

/// The generator config of location k under `cfg`, drawn from `rng`.
GeneratorConfig location_config(const RunConfig& cfg, Rng& rng);

/// All records of one location; never throws for per-location failures.
std::vector<ResultRecord> run_location(const RunConfig& cfg, int k);

/// Runs every location on `cfg.workers` threads and returns the log sorted
/// by (location, model). `progress` (optional) sees each finished location.
std::vector<ResultRecord> run_world(const RunConfig& cfg,
                                    const std::function<void(int)>& progress = {});

/// run_world followed by writing `cfg.output_path` (when set).
std::vector<ResultRecord> run_world_to_file(const RunConfig& cfg);

// ---- aggregation -------------------------------------------------------------

struct MrrEntry {
  ModelTag model = ModelTag::MLP;
  double mrr = 0.0;
  int locations = 0;
};

/// Competition ranking per location among models with finite metrics, over
/// locations where at least two models have one. Throws
/// NoComparableLocations when there is no such location.
std::vector<MrrEntry> aggregate_mrr(std::span<const ResultRecord> records);

struct ModelSummary {
  ModelTag model = ModelTag::MLP;
  MetricKind kind = MetricKind::AUC_OVR;
  double mean = 0.0;
  double se = 0.0;
  int count = 0;
  int failed = 0;
};

/// Mean and standard error of each model's finite metrics.
std::vector<ModelSummary> summarize(std::span<const ResultRecord> records);

struct MarginalRow {
  int bin = 0;
  double center = 0.0;
  ModelTag model = ModelTag::MLP;
  double mean = 0.0;
  double se = 0.0;
  int count = 0;
};

/// Value of a generator parameter or logged graph statistic on a record.
std::optional<double> record_parameter(const ResultRecord& record, const std::string& name);

/// Per quantile bin of `parameter` (over locations) and model: mean, standard
/// error and count of the finite metrics. `bins` = 1 gives global means.
std::vector<MarginalRow> marginal_table(std::span<const ResultRecord> records,
                                        const std::string& parameter, int bins);

/// Header "bin,center,model,mean,se,count".
std::string marginal_csv(const std::vector<MarginalRow>& rows);

}  // namespace graphpop
