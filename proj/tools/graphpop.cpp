#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "graphpop/errors.hpp"
#include "graphpop/explorer.hpp"
#include "graphpop/manifests.hpp"
#include "graphpop/models.hpp"
#include "graphpop/pipeline.hpp"
#include "graphpop/reproduce.hpp"

using namespace graphpop;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

Task infer_task(const std::vector<ResultRecord>& log) {
  for (const auto& r : log) {
    if (r.config.find("ngraphs")) return Task::GPP;
    if (r.metric) return r.metric->kind == MetricKind::AUC_LP ? Task::LP : Task::NC;
  }
  throw NoRecords("cannot tell the task of an empty log");
}

}  // namespace

int main(int argc, char** argv) {
  retain_freed_heap();
  CLI::App app{"graphpop: synthetic graph-learning benchmark populations"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "sample a world and log one record per (location, model)");
  std::string config_path, manifest_path, out_path, task_name, varied;
  std::optional<int> mode, n, workers, rounds, epochs;
  std::optional<std::uint64_t> seed;
  run->add_option("--config", config_path, "RunConfig JSON");
  run->add_option("--task", task_name, "NC, LP or GPP (ignored with --config unless given)");
  run->add_option("--mode", mode, "hyperparameter mode 1, 2 or 3");
  run->add_option("--n", n, "number of world locations");
  run->add_option("--seed", seed, "world seed");
  run->add_option("--workers", workers, "worker threads");
  run->add_option("--out", out_path, "record log path (JSON Lines)");
  run->add_option("--manifest", manifest_path, "mode-2 manifest replacing the model list");
  run->add_option("--rounds", rounds, "mode-3 tuning rounds");
  run->add_option("--varied", varied, "parameter drawn per location around fixed_config");
  run->add_option("--epochs", epochs, "training epochs (default 200)");

  // best-config
  auto* best = app.add_subcommand("best-config", "mode-2 manifest from a log");
  std::string log_path, best_out;
  best->add_option("--log", log_path, "record log")->required();
  best->add_option("--out", best_out, "manifest path (stdout if absent)");

  // explore
  auto* explore = app.add_subcommand("explore", "affective config of a log");
  std::string explore_log, explore_out;
  int explore_bins = 4;
  explore->add_option("--log", explore_log, "record log")->required();
  explore->add_option("--bins", explore_bins, "quantile bins per parameter");
  explore->add_option("--out", explore_out, "RunConfig path (stdout if absent)");

  // mrr
  auto* mrr = app.add_subcommand("mrr", "mean reciprocal rank per model");
  std::string mrr_log;
  mrr->add_option("--log", mrr_log, "record log")->required();

  // marginal
  auto* marginal = app.add_subcommand("marginal", "binned per-model means of one parameter");
  std::string marginal_log, marginal_param, marginal_out;
  int marginal_bins = 4;
  marginal->add_option("--log", marginal_log, "record log")->required();
  marginal->add_option("--param", marginal_param, "generator parameter or graph statistic")
      ->required();
  marginal->add_option("--bins", marginal_bins, "quantile bins");
  marginal->add_option("--out", marginal_out, "CSV path (stdout if absent)");

  // reproduce
  auto* repro = app.add_subcommand("reproduce", "scaled-down experiment with tables and CSVs");
  ReproduceOptions ropt;
  std::string repro_task = "NC";
  repro->add_option("--task", repro_task, "NC, LP or GPP");
  repro->add_option("--mode", ropt.mode, "1, 2 or 3");
  repro->add_option("--n", ropt.n_samples, "locations");
  repro->add_option("--seed", ropt.world_seed, "world seed");
  repro->add_option("--workers", ropt.workers, "worker threads");
  repro->add_option("--rounds", ropt.tuning_rounds, "mode-3 tuning rounds");
  repro->add_option("--bins", ropt.bins, "marginal bins");
  repro->add_option("--out-dir", ropt.out_dir, "output directory");
  repro->add_option("--epochs", ropt.train.epochs, "training epochs");

  // manifest
  auto* manifest = app.add_subcommand("manifest", "print a built-in default manifest");
  std::string manifest_task = "NC";
  manifest->add_option("--task", manifest_task, "NC, LP or GPP");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      RunConfig cfg;
      if (!config_path.empty()) {
        cfg = read_run_config(config_path);
        if (!task_name.empty() && task_from_string(task_name) != cfg.task)
          throw ConfigError("--task disagrees with the config file");
      } else {
        const Task task = task_name.empty() ? Task::NC : task_from_string(task_name);
        cfg.task = task;
        cfg.param_space = default_param_space(task);
        cfg.models = default_models(task);
      }
      if (mode) cfg.mode = *mode;
      if (n) cfg.n_samples = *n;
      if (seed) cfg.world_seed = *seed;
      if (workers) cfg.workers = *workers;
      if (rounds) cfg.tuning_rounds = *rounds;
      if (epochs) cfg.train.epochs = *epochs;
      if (!out_path.empty()) cfg.output_path = out_path;
      if (!varied.empty()) {
        if (!cfg.fixed_config) cfg.fixed_config = default_generator_config(cfg.task);
        cfg.varied_parameter = varied;
      }
      if (!manifest_path.empty()) {
        cfg.models = manifest_from_json(read_json_file(manifest_path));
        if (!mode) cfg.mode = 2;
      }
      cfg.validate();
      const auto log = run_world_to_file(cfg);
      if (cfg.output_path.empty()) write_jsonl(std::cout, log);
      std::size_t ok = 0, failed = 0, skipped = 0;
      for (const auto& r : log)
        (r.status == RecordStatus::Ok ? ok : r.status == RecordStatus::Failed ? failed : skipped)++;
      std::fprintf(stderr, "%zu records: %zu ok, %zu failed, %zu skipped locations\n", log.size(),
                   ok, failed, skipped);
    } else if (*best) {
      const auto log = read_jsonl_file(log_path);
      emit(manifest_json(best_config_manifest(log)).dump(2) + "\n", best_out);
    } else if (*explore) {
      const auto log = read_jsonl_file(explore_log);
      const auto found = affective_config(world_table_from_records(log), explore_bins);
      for (const auto& c : found.choices) {
        std::fprintf(stderr, "%-24s value %-10.6g bin %s%s\n", c.name.c_str(), c.value,
                     c.winning_bin ? std::to_string(*c.winning_bin).c_str() : "-",
                     c.fallback ? " (global median)" : "");
      }
      RunConfig cfg = default_manifest(infer_task(log));
      cfg.fixed_config = found.config;
      emit(to_json(cfg).dump(2) + "\n", explore_out);
    } else if (*mrr) {
      const auto log = read_jsonl_file(mrr_log);
      std::printf("model,mrr,locations\n");
      for (const auto& e : aggregate_mrr(log))
        std::printf("%s,%.6f,%d\n", std::string(to_string(e.model)).c_str(), e.mrr, e.locations);
    } else if (*marginal) {
      const auto log = read_jsonl_file(marginal_log);
      emit(marginal_csv(marginal_table(log, marginal_param, marginal_bins)), marginal_out);
    } else if (*repro) {
      ropt.task = task_from_string(repro_task);
      ropt.log = [](const std::string& line) { std::fprintf(stderr, "%s\n", line.c_str()); };
      const auto result = reproduce(ropt);
      std::cout << summary_markdown(result.summary, repro_task + " mode " +
                                                        std::to_string(ropt.mode));
    } else if (*manifest) {
      std::cout << to_json(default_manifest(task_from_string(manifest_task))).dump(2) << "\n";
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const Error& e) {
    std::fprintf(stderr, "%s: %s\n", e.tag().c_str(), e.what());
    return 1;
  }
  return 0;
}
