#include "graphpop/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "graphpop/errors.hpp"
#include "graphpop/rng.hpp"

namespace graphpop {

std::vector<ModelEntry> default_models(Task task) {
  std::vector<ModelEntry> out;
  for (auto tag : default_roster(task)) out.push_back({tag, default_hyper_space(tag), {}});
  return out;
}

void RunConfig::validate() const {
  if (mode < 1 || mode > 3) throw ConfigError("mode must be 1, 2 or 3");
  if (n_samples < 1) throw ConfigError("n_samples must be at least 1");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (mode == 3 && tuning_rounds < 1) throw ConfigError("tuning_rounds must be at least 1");
  if (param_space.task != task) throw ConfigError("param_space belongs to another task");
  param_space.validate();
  if (varied_parameter) {
    if (!fixed_config) throw ConfigError("varied_parameter needs a fixed_config");
    const auto& names = generator_parameters(task);
    if (std::find(names.begin(), names.end(), *varied_parameter) == names.end())
      throw ConfigError("varied_parameter '" + *varied_parameter + "' is not a generator parameter");
  }
  if (fixed_config)
    for (const auto& name : generator_parameters(task))
      if (!fixed_config->find(name)) throw ConfigError("fixed_config is missing '" + name + "'");
  if (models.empty()) throw ConfigError("models must not be empty");
  std::set<ModelTag> seen;
  for (const auto& m : models) {
    if (!seen.insert(m.tag).second)
      throw ConfigError("model " + std::string(to_string(m.tag)) + " listed twice");
    if (!applies_to(m.tag, task))
      throw ConfigError(std::string(to_string(m.tag)) + " does not apply to " +
                        std::string(to_string(task)));
    if (m.hyper_space) validate_for(*m.hyper_space, m.tag);
    if (m.hyper_config) validate_for(*m.hyper_config, m.tag);
    if (mode == 2 && !m.hyper_config && !applicable_axes(m.tag).empty())
      throw ConfigError("mode 2 needs a hyper_config for " + std::string(to_string(m.tag)));
  }
}

namespace {

const std::vector<std::string> kRunConfigKeys = {
    "task",         "mode",    "n_samples",     "world_seed",   "workers",
    "param_space",  "fixed_config", "varied_parameter", "models", "tuning_rounds",
    "output_path"};

Json model_entry_json(const ModelEntry& m) {
  Json j = Json::object();
  j["tag"] = std::string(to_string(m.tag));
  if (m.hyper_space) j["hyper_space"] = to_json(*m.hyper_space);
  if (m.hyper_config) j["hyper_config"] = to_json(*m.hyper_config);
  return j;
}

ModelEntry model_entry_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("model entry must be an object");
  for (const auto& [key, _] : j.items())
    if (key != "tag" && key != "hyper_space" && key != "hyper_config")
      throw ConfigError("unknown key '" + key + "' in model entry");
  if (!j.contains("tag")) throw ConfigError("model entry needs a tag");
  ModelEntry m;
  m.tag = model_tag_from_string(j.at("tag").get<std::string>());
  if (j.contains("hyper_space")) m.hyper_space = hyper_space_from_json(j.at("hyper_space"));
  if (j.contains("hyper_config")) m.hyper_config = hyper_config_from_json(j.at("hyper_config"));
  return m;
}

}  // namespace

Json to_json(const RunConfig& cfg) {
  Json j = Json::object();
  j["task"] = std::string(to_string(cfg.task));
  j["mode"] = cfg.mode;
  j["n_samples"] = cfg.n_samples;
  j["world_seed"] = cfg.world_seed;
  j["workers"] = cfg.workers;
  j["param_space"] = to_json(cfg.param_space);
  j["fixed_config"] = cfg.fixed_config ? to_json(*cfg.fixed_config) : Json(nullptr);
  j["varied_parameter"] = cfg.varied_parameter ? Json(*cfg.varied_parameter) : Json(nullptr);
  Json models = Json::array();
  for (const auto& m : cfg.models) models.push_back(model_entry_json(m));
  j["models"] = std::move(models);
  j["tuning_rounds"] = cfg.tuning_rounds;
  j["output_path"] = cfg.output_path;
  return j;
}

RunConfig run_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (std::find(kRunConfigKeys.begin(), kRunConfigKeys.end(), key) == kRunConfigKeys.end())
      throw ConfigError("unknown run config key '" + key + "'");
  try {
    RunConfig cfg;
    if (j.contains("task")) cfg.task = task_from_string(j.at("task").get<std::string>());
    cfg.param_space = default_param_space(cfg.task);
    if (j.contains("mode")) cfg.mode = j.at("mode").get<int>();
    if (j.contains("n_samples")) cfg.n_samples = j.at("n_samples").get<int>();
    if (j.contains("world_seed")) cfg.world_seed = j.at("world_seed").get<std::uint64_t>();
    if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
    if (j.contains("param_space") && !j.at("param_space").is_null())
      cfg.param_space = param_space_from_json(cfg.task, j.at("param_space"));
    if (j.contains("fixed_config") && !j.at("fixed_config").is_null())
      cfg.fixed_config = generator_config_from_json(j.at("fixed_config"));
    if (j.contains("varied_parameter") && !j.at("varied_parameter").is_null())
      cfg.varied_parameter = j.at("varied_parameter").get<std::string>();
    if (j.contains("models")) {
      if (!j.at("models").is_array()) throw ConfigError("models must be a list");
      for (const auto& m : j.at("models")) cfg.models.push_back(model_entry_from_json(m));
    } else {
      cfg.models = default_models(cfg.task);
    }
    if (j.contains("tuning_rounds")) cfg.tuning_rounds = j.at("tuning_rounds").get<int>();
    if (j.contains("output_path")) cfg.output_path = j.at("output_path").get<std::string>();
    cfg.validate();
    return cfg;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed run config: ") + e.what());
  }
}

RunConfig read_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

void write_run_config(const std::string& path, const RunConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << to_json(cfg).dump(2) << '\n';
}

Json manifest_json(const std::vector<ModelEntry>& models) {
  Json list = Json::array();
  for (const auto& m : models) {
    Json e = Json::object();
    e["tag"] = std::string(to_string(m.tag));
    e["hyper_config"] = to_json(m.hyper_config.value_or(HyperConfig{}));
    list.push_back(std::move(e));
  }
  Json j = Json::object();
  j["models"] = std::move(list);
  return j;
}

std::vector<ModelEntry> manifest_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("models") || !j.at("models").is_array())
    throw ConfigError("manifest must be an object with a models list");
  std::vector<ModelEntry> out;
  for (const auto& m : j.at("models")) {
    auto entry = model_entry_from_json(m);
    if (!entry.hyper_config) throw ConfigError("manifest entry without hyper_config");
    out.push_back(std::move(entry));
  }
  return out;
}

std::vector<ModelEntry> best_config_manifest(std::span<const ResultRecord> records) {
  std::set<ModelTag> tags;
  for (const auto& r : records)
    if (r.model && r.has_finite_metric()) tags.insert(*r.model);
  if (tags.empty()) throw NoRecords("log has no finite records");
  std::vector<ModelEntry> out;
  for (auto tag : tags) out.push_back({tag, std::nullopt, select_best_config(records, tag)});
  return out;
}

GeneratorConfig location_config(const RunConfig& cfg, Rng& rng) {
  if (!cfg.fixed_config) return sample_generator_config(cfg.param_space, rng);
  GeneratorConfig out = *cfg.fixed_config;
  if (cfg.varied_parameter) {
    const ParamSpace one{cfg.task, {{*cfg.varied_parameter, cfg.param_space.at(*cfg.varied_parameter)}}};
    out.set(*cfg.varied_parameter, sample_generator_config(one, rng).get(*cfg.varied_parameter));
  }
  if (cfg.task != Task::GPP && !out.find("feature_dim")) out.set("feature_dim", kDefaultFeatureDim);
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void mark_failed(ResultRecord& r, const std::string& tag, const std::string& what) {
  r.status = RecordStatus::Failed;
  r.metric.reset();
  r.error = tag;
  r.message = what;
}

}  // namespace

std::vector<ResultRecord> run_location(const RunConfig& cfg, int k) {
  ResultRecord base;
  base.location = k;
  base.location_seed = seed_for_location(cfg.world_seed, static_cast<std::uint64_t>(k));
  const auto start = Clock::now();
  Rng rng(base.location_seed);

  std::optional<TaskDataset> dataset;
  try {
    base.config = location_config(cfg, rng);
    if (cfg.task == Task::GPP) {
      dataset = make_gpp_dataset(base.config, rng);
      base.stats = compute_stats(*dataset);
    } else {
      const AttributedGraph g = sample_attributed_sbm(base.config, rng);
      base.stats = compute_stats(g);
      if (cfg.task == Task::NC)
        dataset = make_nc_dataset(g, rng);
      else
        dataset = make_lp_dataset(g, rng);
    }
  } catch (const Error& e) {
    base.status = RecordStatus::Skipped;
    base.error = e.tag();
    base.message = e.what();
    base.wall_ms = elapsed_ms(start);
    return {base};
  }

  std::vector<ResultRecord> out;
  for (std::size_t mi = 0; mi < cfg.models.size(); ++mi) {
    const auto& entry = cfg.models[mi];
    ResultRecord r = base;
    r.model = entry.tag;
    const auto model_start = Clock::now();
    Rng mrng(substream_seed(base.location_seed, mi + 1));
    try {
      if (cfg.mode == 3) {
        const TuneResult tuned =
            tune_with_budget(entry.tag, entry.space(), *dataset, cfg.tuning_rounds, mrng, cfg.train);
        r.hyper = tuned.config;
        r.metric = tuned.test;
      } else {
        r.hyper = cfg.mode == 1 ? draw_hyperconfig(entry.space(), mrng)
                                : entry.hyper_config.value_or(HyperConfig{});
        const std::uint64_t seed = mrng();
        const TrainedModel model = train_model(entry.tag, r.hyper, *dataset, seed, cfg.train);
        r.metric = evaluate(model, *dataset, Split::Test);
      }
      r.status = RecordStatus::Ok;
    } catch (const Error& e) {
      mark_failed(r, e.tag(), e.what());
    } catch (const std::exception& e) {
      mark_failed(r, "Exception", e.what());
    }
    r.wall_ms = elapsed_ms(model_start);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ResultRecord> run_world(const RunConfig& cfg, const std::function<void(int)>& progress) {
  cfg.validate();
  std::vector<ResultRecord> log;
  std::mutex sink;
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < cfg.n_samples; k = next++) {
      auto records = run_location(cfg, k);
      const std::lock_guard lock(sink);
      for (auto& r : records) log.push_back(std::move(r));
      if (progress) progress(k);
    }
  };
  const int threads = std::min(cfg.workers, cfg.n_samples);
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  sort_records(log);
  return log;
}

std::vector<ResultRecord> run_world_to_file(const RunConfig& cfg) {
  if (!cfg.output_path.empty()) {
    // fail before spending compute on an unwritable destination
    std::ofstream probe(cfg.output_path, std::ios::app);
    if (!probe) throw IoError("cannot open '" + cfg.output_path + "' for writing");
  }
  auto log = run_world(cfg);
  if (!cfg.output_path.empty()) write_jsonl_file(cfg.output_path, log);
  return log;
}

}  // namespace graphpop
