#pragma once

#include <string>
#include <vector>

#include "graphpop/generators.hpp"
#include "graphpop/pipeline.hpp"

namespace graphpop {

/// Default generator values for Mode 2/3 runs. LP carries two defaults that
/// lie outside their own sampling ranges (p_q_ratio 12.40, cluster_size_slope
/// 0.92); they are kept verbatim.
GeneratorConfig default_generator_config(Task task);

/// Names of default values outside the task's sampling ranges.
std::vector<std::string> out_of_range_defaults(Task task);

/// Mode-3 run at the default config with the published grids and 100
/// tuning rounds, sampling every parameter until a varied one is chosen.
RunConfig default_manifest(Task task);

/// File name of the shipped manifest, e.g. "nc_default.json".
std::string default_manifest_name(Task task);

}  // namespace graphpop
