#pragma once

#include <span>
#include <utility>
#include <vector>

#include "graphpop/hyperconfig.hpp"
#include "graphpop/metrics.hpp"
#include "graphpop/models.hpp"
#include "graphpop/records.hpp"
#include "graphpop/rng.hpp"
#include "graphpop/tasks.hpp"

namespace graphpop {

/// Discrete search space of one model: an ordered list of (axis, values).
struct HyperSpace {
  std::vector<std::pair<HyperAxis, std::vector<double>>> axes;

  friend bool operator==(const HyperSpace&, const HyperSpace&) = default;
};

/// The published grid restricted to the axes `tag` reads.
HyperSpace default_hyper_space(ModelTag tag);

/// Throws ConfigError on empty value lists, axes the model does not read,
/// missing axes, or out-of-domain values.
void validate_for(const HyperSpace& space, ModelTag tag);

Json to_json(const HyperSpace& space);
HyperSpace hyper_space_from_json(const Json& j);

/// Independent uniform draw per axis, axes in listed order.
HyperConfig draw_hyperconfig(const HyperSpace& space, Rng& rng);

/// The config with the best mean metric over the model's ok records
/// (max for AUC, min for scaled MSE); ties go to the smallest canonical
/// string. Throws NoRecords if the model has no finite record.
HyperConfig select_best_config(std::span<const ResultRecord> records, ModelTag tag);

struct TuneResult {
  HyperConfig config;
  MetricValue tune;
  MetricValue test;
  int best_round = 0;
  int failed_rounds = 0;
};

/// Budgeted random search: each round draws a config and a training seed
/// from `rng`, trains, and scores the tune split. The earliest best round is
/// evaluated once on test. Models without hyperparameters run one round.
/// Throws AllRoundsFailed when no round produced a finite tune score.
TuneResult tune_with_budget(ModelTag tag, const HyperSpace& space, const TaskDataset& dataset,
                            int rounds, Rng& rng, const TrainOptions& options = {});

}  // namespace graphpop
