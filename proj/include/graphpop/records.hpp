#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphpop/generators.hpp"
#include "graphpop/hyperconfig.hpp"
#include "graphpop/metrics.hpp"
#include "graphpop/tasks.hpp"

namespace graphpop {

enum class RecordStatus { Ok, Failed, Skipped };

std::string_view to_string(RecordStatus status);
RecordStatus record_status_from_string(std::string_view name);

/// One (location, model) outcome. A location whose split is infeasible
/// yields a single Skipped record with no model.
struct ResultRecord {
  int location = 0;
  std::uint64_t location_seed = 0;
  GeneratorConfig config;
  std::optional<GraphStats> stats;
  std::optional<ModelTag> model;
  HyperConfig hyper;
  RecordStatus status = RecordStatus::Ok;
  std::optional<MetricValue> metric;
  std::string error;    ///< error tag, empty when ok
  std::string message;
  double wall_ms = 0.0;

  bool has_finite_metric() const;

  friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

Json to_json(const GraphStats& stats);
GraphStats graph_stats_from_json(const Json& j);

/// Keys are always written in the same order so logs are byte-comparable.
Json to_json(const ResultRecord& record);
ResultRecord result_record_from_json(const Json& j);

/// One record per line.
void write_jsonl(std::ostream& out, const std::vector<ResultRecord>& records);
std::vector<ResultRecord> read_jsonl(std::istream& in);

/// Throws IoError when the file cannot be opened.
void write_jsonl_file(const std::string& path, const std::vector<ResultRecord>& records);
std::vector<ResultRecord> read_jsonl_file(const std::string& path);

/// Orders by (location, model tag); skipped records come first in their
/// location.
void sort_records(std::vector<ResultRecord>& records);

}  // namespace graphpop
