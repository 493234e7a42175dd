#include "graphpop/records.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "graphpop/errors.hpp"

namespace graphpop {

std::string_view to_string(RecordStatus status) {
  switch (status) {
    case RecordStatus::Ok: return "ok";
    case RecordStatus::Failed: return "failed";
    case RecordStatus::Skipped: return "skipped";
  }
  return "?";
}

RecordStatus record_status_from_string(std::string_view name) {
  for (auto s : {RecordStatus::Ok, RecordStatus::Failed, RecordStatus::Skipped})
    if (to_string(s) == name) return s;
  throw ConfigError("unknown record status '" + std::string(name) + "'");
}

bool ResultRecord::has_finite_metric() const {
  return status == RecordStatus::Ok && metric && std::isfinite(metric->value);
}

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> read_optional(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

Json to_json(const GraphStats& stats) {
  Json j = Json::object();
  j["average_degree"] = stats.average_degree;
  j["edge_homogeneity"] = optional_number(stats.edge_homogeneity);
  j["degree_gini"] = optional_number(stats.degree_gini);
  j["avg_clustering"] = stats.avg_clustering;
  return j;
}

GraphStats graph_stats_from_json(const Json& j) {
  GraphStats s;
  s.average_degree = j.at("average_degree").get<double>();
  s.edge_homogeneity = read_optional(j, "edge_homogeneity");
  s.degree_gini = read_optional(j, "degree_gini");
  s.avg_clustering = j.at("avg_clustering").get<double>();
  return s;
}

Json to_json(const ResultRecord& r) {
  Json j = Json::object();
  j["location"] = r.location;
  j["location_seed"] = r.location_seed;
  j["config"] = to_json(r.config);
  j["stats"] = r.stats ? to_json(*r.stats) : Json(nullptr);
  j["model"] = r.model ? Json(std::string(to_string(*r.model))) : Json(nullptr);
  j["hyper"] = to_json(r.hyper);
  j["status"] = std::string(to_string(r.status));
  if (r.metric) {
    Json m = Json::object();
    m["kind"] = std::string(to_string(r.metric->kind));
    m["value"] = r.metric->value;
    j["metric"] = std::move(m);
  } else {
    j["metric"] = nullptr;
  }
  j["error"] = r.error.empty() ? Json(nullptr) : Json(r.error);
  j["message"] = r.message.empty() ? Json(nullptr) : Json(r.message);
  j["wall_ms"] = r.wall_ms;
  return j;
}

ResultRecord result_record_from_json(const Json& j) {
  try {
    ResultRecord r;
    r.location = j.at("location").get<int>();
    r.location_seed = j.at("location_seed").get<std::uint64_t>();
    r.config = generator_config_from_json(j.at("config"));
    if (!j.at("stats").is_null()) r.stats = graph_stats_from_json(j.at("stats"));
    if (!j.at("model").is_null()) r.model = model_tag_from_string(j.at("model").get<std::string>());
    r.hyper = hyper_config_from_json(j.at("hyper"));
    r.status = record_status_from_string(j.at("status").get<std::string>());
    if (!j.at("metric").is_null()) {
      const auto& m = j.at("metric");
      // non-finite values are written as null by the JSON layer
      const double v = m.at("value").is_null() ? std::nan("") : m.at("value").get<double>();
      r.metric = MetricValue{metric_kind_from_string(m.at("kind").get<std::string>()), v};
    }
    if (j.contains("error") && !j.at("error").is_null()) r.error = j.at("error").get<std::string>();
    if (j.contains("message") && !j.at("message").is_null())
      r.message = j.at("message").get<std::string>();
    r.wall_ms = j.value("wall_ms", 0.0);
    return r;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed record: ") + e.what());
  }
}

void write_jsonl(std::ostream& out, const std::vector<ResultRecord>& records) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

std::vector<ResultRecord> read_jsonl(std::istream& in) {
  std::vector<ResultRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("malformed log line: ") + e.what());
    }
    out.push_back(result_record_from_json(j));
  }
  return out;
}

void write_jsonl_file(const std::string& path, const std::vector<ResultRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_jsonl(out, records);
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<ResultRecord> read_jsonl_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_jsonl(in);
}

void sort_records(std::vector<ResultRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const ResultRecord& a, const ResultRecord& b) {
    if (a.location != b.location) return a.location < b.location;
    const int ma = a.model ? static_cast<int>(*a.model) : -1;
    const int mb = b.model ? static_cast<int>(*b.model) : -1;
    return ma < mb;
  });
}

}  // namespace graphpop
