#include "graphpop/manifests.hpp"

#include <algorithm>
#include <cctype>

namespace graphpop {

GeneratorConfig default_generator_config(Task task) {
  switch (task) {
    case Task::NC:
      return GeneratorConfig({{"nvertex", 343},
                              {"p_q_ratio", 3.98},
                              {"avg_degree", 1.75},
                              {"feature_center_distance", 0.20},
                              {"num_clusters", 5},
                              {"cluster_size_slope", 0.08},
                              {"power_exponent", 1.0},
                              {"feature_dim", kDefaultFeatureDim}});
    case Task::LP:
      return GeneratorConfig({{"nvertex", 481},
                              {"p_q_ratio", 12.40},
                              {"avg_degree", 10.12},
                              {"feature_center_distance", 2.20},
                              {"num_clusters", 4},
                              {"cluster_size_slope", 0.92},
                              {"power_exponent", 1.0},
                              {"feature_dim", kDefaultFeatureDim}});
    case Task::GPP:
      return GeneratorConfig({{"ngraphs", 499},
                              {"num_vertices", 6},
                              {"edge_prob", 0.72},
                              {"train_prob", 0.60}});
  }
  return {};
}

std::vector<std::string> out_of_range_defaults(Task task) {
  const ParamSpace space = default_param_space(task);
  const GeneratorConfig defaults = default_generator_config(task);
  std::vector<std::string> out;
  for (const auto& [name, value] : defaults.values()) {
    if (!space.contains(name)) continue;
    const auto& r = space.at(name);
    if (value < r.min || value > r.max) out.push_back(name);
  }
  return out;
}

RunConfig default_manifest(Task task) {
  RunConfig cfg;
  cfg.task = task;
  cfg.mode = 3;
  cfg.n_samples = 500;
  cfg.world_seed = 0;
  cfg.workers = 1;
  cfg.param_space = default_param_space(task);
  cfg.fixed_config = default_generator_config(task);
  cfg.models = default_models(task);
  cfg.tuning_rounds = 100;
  return cfg;
}

std::string default_manifest_name(Task task) {
  std::string name(to_string(task));
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return name + "_default.json";
}

}  // namespace graphpop
