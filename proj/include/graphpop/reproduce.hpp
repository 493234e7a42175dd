#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "graphpop/pipeline.hpp"

namespace graphpop {

struct ReproduceOptions {
  Task task = Task::NC;
  int mode = 1;
  int n_samples = 500;
  std::uint64_t world_seed = 0;
  int workers = 1;
  int tuning_rounds = 100;
  int bins = 4;
  std::string out_dir = "results";
  TrainOptions train;
  std::function<void(const std::string&)> log;  ///< progress lines, optional
};

struct ReproduceResult {
  std::vector<ResultRecord> records;     ///< every run of the experiment
  std::vector<ModelSummary> summary;
  std::vector<std::string> files;        ///< everything written under out_dir
};

/// Mode 1 samples every generator parameter. Modes 2 and 3 first run Mode 1
/// (Mode 2 takes its configs from that log), then vary one parameter at a
/// time around the default config, splitting n_samples across parameters.
/// Writes the logs, summary.md, marginal CSVs and the affective config found
/// on the Mode 1 log.
ReproduceResult reproduce(const ReproduceOptions& options);

/// Markdown table of mean +- s.e. per model.
std::string summary_markdown(const std::vector<ModelSummary>& summary, const std::string& title);

}  // namespace graphpop
