#include "graphpop/reproduce.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "graphpop/errors.hpp"
#include "graphpop/explorer.hpp"
#include "graphpop/manifests.hpp"
#include "graphpop/rng.hpp"

namespace graphpop {
namespace {

namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text, std::vector<std::string>& files) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  files.push_back(path.string());
}

void write_log(const fs::path& path, const std::vector<ResultRecord>& log,
               std::vector<std::string>& files) {
  write_jsonl_file(path.string(), log);
  files.push_back(path.string());
}

void write_marginals(const fs::path& dir, const std::string& prefix,
                     const std::vector<ResultRecord>& log, const std::vector<std::string>& params,
                     int bins, std::vector<std::string>& files) {
  for (const auto& p : params) {
    try {
      write_text(dir / (prefix + p + ".csv"), marginal_csv(marginal_table(log, p, bins)), files);
    } catch (const TooFewValues&) {
    } catch (const InvalidArgument&) {
    }
  }
}

}  // namespace

std::string summary_markdown(const std::vector<ModelSummary>& summary, const std::string& title) {
  std::string out = "### " + title + "\n\n| Model | Metric | Mean | S.E. | n | failed |\n";
  out += "|---|---|---|---|---|---|\n";
  char buf[256];
  for (const auto& s : summary) {
    std::snprintf(buf, sizeof buf, "| %s | %s | %.4f | %.4f | %d | %d |\n",
                  std::string(to_string(s.model)).c_str(), std::string(to_string(s.kind)).c_str(),
                  s.mean, s.se, s.count, s.failed);
    out += buf;
  }
  return out;
}

ReproduceResult reproduce(const ReproduceOptions& opt) {
  if (opt.mode < 1 || opt.mode > 3) throw ConfigError("mode must be 1, 2 or 3");
  const fs::path dir(opt.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + opt.out_dir + "': " + ec.message());
  auto say = [&](const std::string& line) {
    if (opt.log) opt.log(line);
  };

  ReproduceResult result;
  std::vector<std::string> stat_names = {"average_degree", "edge_homogeneity", "degree_gini",
                                         "avg_clustering"};
  std::vector<std::string> params = generator_parameters(opt.task);

  RunConfig base;
  base.task = opt.task;
  base.mode = 1;
  base.n_samples = opt.n_samples;
  base.world_seed = opt.world_seed;
  base.workers = opt.workers;
  base.param_space = default_param_space(opt.task);
  base.models = default_models(opt.task);
  base.tuning_rounds = opt.tuning_rounds;
  base.train = opt.train;

  say("mode 1 world: " + std::to_string(base.n_samples) + " locations");
  const auto mode1 = run_world(base);
  const std::string tag = std::string(to_string(opt.task));
  write_log(dir / ("mode1_" + tag + ".jsonl"), mode1, result.files);
  write_marginals(dir, "mode1_marginal_", mode1, params, opt.bins, result.files);
  write_marginals(dir, "mode1_marginal_", mode1, stat_names, opt.bins, result.files);
  try {
    const auto table = world_table_from_records(mode1);
    const auto found = affective_config(table, opt.bins);
    write_text(dir / "affective_config.json", to_json(found.config).dump(2) + "\n", result.files);
  } catch (const Error& e) {
    say(std::string("exploration skipped: ") + e.what());
  }

  if (opt.mode == 1) {
    result.records = mode1;
  } else {
    RunConfig run = base;
    run.mode = opt.mode;
    run.fixed_config = default_generator_config(opt.task);
    if (opt.mode == 2) {
      run.models = best_config_manifest(mode1);
      write_text(dir / "mode2_manifest.json", manifest_json(run.models).dump(2) + "\n",
                 result.files);
    }
    const int per_param = std::max(1, opt.n_samples / static_cast<int>(params.size()));
    for (std::size_t p = 0; p < params.size(); ++p) {
      run.varied_parameter = params[p];
      run.n_samples = per_param;
      run.world_seed = substream_seed(opt.world_seed, p + 1);
      say("mode " + std::to_string(opt.mode) + " varying " + params[p] + ": " +
          std::to_string(per_param) + " locations");
      auto log = run_world(run);
      const std::string prefix = "mode" + std::to_string(opt.mode) + "_";
      write_log(dir / (prefix + tag + "_" + params[p] + ".jsonl"), log, result.files);
      write_marginals(dir, prefix + "marginal_", log, {params[p]}, opt.bins, result.files);
      result.records.insert(result.records.end(), log.begin(), log.end());
    }
  }

  result.summary = summarize(result.records);
  std::string md = summary_markdown(
      result.summary, tag + " mode " + std::to_string(opt.mode) + ", " +
                          std::to_string(opt.n_samples) + " locations, seed " +
                          std::to_string(opt.world_seed));
  try {
    md += "\n| Model | MRR | locations |\n|---|---|---|\n";
    char buf[128];
    for (const auto& m : aggregate_mrr(result.records)) {
      std::snprintf(buf, sizeof buf, "| %s | %.4f | %d |\n", std::string(to_string(m.model)).c_str(),
                    m.mrr, m.locations);
      md += buf;
    }
  } catch (const NoComparableLocations&) {
  }
  write_text(dir / "summary.md", md, result.files);
  return result;
}

}  // namespace graphpop
