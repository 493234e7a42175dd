#include "graphpop/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "graphpop/errors.hpp"

namespace graphpop {

namespace {

const std::vector<std::string> kSbmParameters = {
    "nvertex",      "p_q_ratio",          "avg_degree",    "feature_center_distance",
    "num_clusters", "cluster_size_slope", "power_exponent"};

const std::vector<std::string> kGppParameters = {"ngraphs", "num_vertices",
                                                 "edge_prob", "train_prob"};

// uniform on (0, 1]
double uniform_open_closed(Rng& rng) {
  return 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Batagelj-Brandes skipping over `count` candidate slots, each kept with
// probability prob. Calls emit(slot) for every kept slot in increasing order.
template <class Emit>
void geometric_skip(std::int64_t count, double prob, Rng& rng, Emit&& emit) {
  if (count <= 0 || prob <= 0.0) return;
  if (prob >= 1.0) {
    for (std::int64_t i = 0; i < count; ++i) emit(i);
    return;
  }
  const double log_q = std::log1p(-prob);
  std::int64_t slot = -1;
  while (true) {
    const double skip = std::floor(std::log(uniform_open_closed(rng)) / log_q);
    if (skip >= static_cast<double>(count - slot - 1)) return;
    slot += 1 + static_cast<std::int64_t>(skip);
    emit(slot);
  }
}

}  // namespace

std::string_view to_string(Task task) {
  switch (task) {
    case Task::NC: return "NC";
    case Task::LP: return "LP";
    case Task::GPP: return "GPP";
  }
  return "?";
}

Task task_from_string(std::string_view name) {
  if (name == "NC") return Task::NC;
  if (name == "LP") return Task::LP;
  if (name == "GPP") return Task::GPP;
  throw ConfigError("unknown task '" + std::string(name) + "'");
}

const std::vector<std::string>& generator_parameters(Task task) {
  return task == Task::GPP ? kGppParameters : kSbmParameters;
}

bool is_integer_parameter(std::string_view name) {
  return name == "nvertex" || name == "num_clusters" || name == "feature_dim" ||
         name == "ngraphs" || name == "num_vertices";
}

const ParamRange& ParamSpace::at(std::string_view name) const {
  for (const auto& [key, range] : ranges)
    if (key == name) return range;
  throw ConfigError("parameter '" + std::string(name) + "' not in space");
}

bool ParamSpace::contains(std::string_view name) const {
  return std::any_of(ranges.begin(), ranges.end(),
                     [&](const auto& kv) { return kv.first == name; });
}

void ParamSpace::validate() const {
  const auto& expected = generator_parameters(task);
  std::size_t matched = 0;
  for (const auto& [name, range] : ranges) {
    const bool known = std::find(expected.begin(), expected.end(), name) != expected.end();
    const bool extra = task != Task::GPP && name == "feature_dim";
    if (!known && !extra)
      throw ConfigError("parameter '" + name + "' not valid for task " +
                        std::string(to_string(task)));
    matched += known;
    if (!(range.min <= range.max))
      throw ConfigError("parameter '" + name + "' has min > max");
    if (range.integer != is_integer_parameter(name))
      throw ConfigError("parameter '" + name + "' has the wrong integer flag");
    if (range.integer && std::ceil(range.min) > std::floor(range.max))
      throw ConfigError("integer parameter '" + name + "' has an empty range");
  }
  if (matched != expected.size())
    throw ConfigError("param_space is missing parameters for task " +
                      std::string(to_string(task)));
}

ParamSpace default_param_space(Task task) {
  ParamSpace space{task, {}};
  if (task == Task::GPP) {
    space.ranges = {{"ngraphs", {100, 500, true}},
                    {"num_vertices", {5, 30, true}},
                    {"edge_prob", {0.1, 0.75, false}},
                    {"train_prob", {0.2, 0.6, false}}};
  } else {
    space.ranges = {{"nvertex", {128, 512, true}},
                    {"p_q_ratio", {1.0, 10.0, false}},
                    {"avg_degree", {1.0, 20.0, false}},
                    {"feature_center_distance", {0.0, 5.0, false}},
                    {"num_clusters", {2, 6, true}},
                    {"cluster_size_slope", {0.0, 0.5, false}},
                    {"power_exponent", {0.5, 1.0, false}}};
  }
  return space;
}

double GeneratorConfig::get(std::string_view name) const {
  if (auto v = find(name)) return *v;
  throw ConfigError("generator config has no parameter '" + std::string(name) + "'");
}

std::optional<double> GeneratorConfig::find(std::string_view name) const {
  for (const auto& [key, value] : values_)
    if (key == name) return value;
  return std::nullopt;
}

std::int64_t GeneratorConfig::get_int(std::string_view name) const {
  return static_cast<std::int64_t>(std::llround(get(name)));
}

void GeneratorConfig::set(std::string_view name, double value) {
  for (auto& [key, v] : values_)
    if (key == name) {
      v = value;
      return;
    }
  values_.emplace_back(std::string(name), value);
}

Json to_json(const GeneratorConfig& cfg) {
  Json out = Json::object();
  for (const auto& [name, value] : cfg.values()) {
    if (is_integer_parameter(name))
      out[name] = static_cast<std::int64_t>(std::llround(value));
    else
      out[name] = value;
  }
  return out;
}

GeneratorConfig generator_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("generator config must be an object");
  std::vector<std::pair<std::string, double>> values;
  for (const auto& [name, value] : j.items()) {
    if (!value.is_number())
      throw ConfigError("generator parameter '" + name + "' must be numeric");
    values.emplace_back(name, value.get<double>());
  }
  return GeneratorConfig(std::move(values));
}

Json to_json(const ParamSpace& space) {
  Json out = Json::object();
  for (const auto& [name, r] : space.ranges) {
    Json entry;
    if (r.integer) {
      entry["min"] = static_cast<std::int64_t>(std::llround(r.min));
      entry["max"] = static_cast<std::int64_t>(std::llround(r.max));
    } else {
      entry["min"] = r.min;
      entry["max"] = r.max;
    }
    entry["integer"] = r.integer;
    out[name] = std::move(entry);
  }
  return out;
}

ParamSpace param_space_from_json(Task task, const Json& j) {
  if (!j.is_object()) throw ConfigError("param_space must be an object");
  ParamSpace space{task, {}};
  // canonical order first, then feature_dim
  auto order = generator_parameters(task);
  if (task != Task::GPP) order.push_back("feature_dim");
  for (const auto& [name, entry] : j.items())
    if (std::find(order.begin(), order.end(), name) == order.end())
      throw ConfigError("parameter '" + name + "' not valid for task " +
                        std::string(to_string(task)));
  for (const auto& name : order) {
    if (!j.contains(name)) continue;
    const auto& entry = j[name];
    if (!entry.is_object()) throw ConfigError("range for '" + name + "' must be an object");
    for (const auto& [key, _] : entry.items())
      if (key != "min" && key != "max" && key != "integer")
        throw ConfigError("unknown key '" + key + "' in range for '" + name + "'");
    try {
      ParamRange r;
      r.min = entry.at("min").get<double>();
      r.max = entry.at("max").get<double>();
      r.integer = entry.contains("integer") ? entry["integer"].get<bool>()
                                            : is_integer_parameter(name);
      space.ranges.emplace_back(name, r);
    } catch (const Json::exception& e) {
      throw ConfigError("bad range for '" + name + "': " + e.what());
    }
  }
  space.validate();
  return space;
}

GeneratorConfig sample_generator_config(const ParamSpace& space, Rng& rng) {
  std::vector<std::pair<std::string, double>> values;
  values.reserve(space.ranges.size() + 1);
  for (const auto& [name, r] : space.ranges) {
    double v;
    if (r.integer) {
      const auto lo = static_cast<std::int64_t>(std::ceil(r.min));
      const auto hi = static_cast<std::int64_t>(std::floor(r.max));
      v = static_cast<double>(std::uniform_int_distribution<std::int64_t>(lo, hi)(rng));
    } else if (r.min == r.max) {
      v = r.min;
    } else {
      v = std::uniform_real_distribution<double>(r.min, r.max)(rng);
    }
    values.emplace_back(name, v);
  }
  GeneratorConfig cfg(std::move(values));
  if (space.task != Task::GPP && !cfg.find("feature_dim"))
    cfg.set("feature_dim", kDefaultFeatureDim);
  return cfg;
}

std::vector<int> sample_cluster_sizes(int n, int k, double slope) {
  if (k < 1) throw InvalidArgument("need at least one cluster");
  if (n < k) throw InvalidArgument("fewer nodes than clusters");
  if (slope < 0) throw InvalidArgument("cluster size slope must be nonnegative");

  std::vector<double> weights(k);
  for (int i = 0; i < k; ++i) weights[i] = 1.0 + slope * i;
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);

  std::vector<int> sizes(k);
  std::vector<double> remainder(k);
  int assigned = 0;
  for (int i = 0; i < k; ++i) {
    const double quota = n * weights[i] / total;
    sizes[i] = static_cast<int>(std::floor(quota));
    remainder[i] = quota - sizes[i];
    assigned += sizes[i];
  }
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    return a > b;
  });
  for (int i = 0; i < n - assigned; ++i) ++sizes[order[i]];

  // empty clusters (only possible for n close to k with a steep slope)
  for (int i = k - 1; i >= 0; --i) {
    if (sizes[i] > 0) continue;
    auto largest = std::max_element(sizes.rbegin(), sizes.rend());
    --*largest;
    sizes[i] = 1;
  }
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

Eigen::VectorXd sample_degree_propensities(int block_size, double power_exponent,
                                           Rng& rng) {
  if (block_size < 1) throw InvalidArgument("block size must be positive");
  if (!(power_exponent > 0)) throw InvalidArgument("power exponent must be positive");
  Eigen::VectorXd theta(block_size);
  for (int i = 0; i < block_size; ++i)
    theta[i] = std::pow(uniform_open_closed(rng), 1.0 / power_exponent);
  return theta / theta.mean();
}

EdgeProbabilities derive_edge_probs(double p_q_ratio, double avg_degree,
                                    const std::vector<int>& sizes) {
  if (p_q_ratio < 1.0) throw InvalidArgument("p/q ratio must be >= 1");
  if (!(avg_degree > 0)) throw InvalidArgument("average degree must be positive");
  const double n = std::accumulate(sizes.begin(), sizes.end(), 0.0);
  double denom = 0.0;
  for (int s : sizes) denom += s * (p_q_ratio * (s - 1) + (n - s));
  if (denom == 0.0)
    throw InvalidArgument("edge probabilities undefined for a single-node graph");
  const double q = avg_degree * n / denom;
  return {p_q_ratio * q, q};
}

SbmParams sample_sbm_params(const GeneratorConfig& cfg, Rng& rng) {
  SbmParams params;
  const int n = static_cast<int>(cfg.get_int("nvertex"));
  const int k = static_cast<int>(cfg.get_int("num_clusters"));
  params.sizes = sample_cluster_sizes(n, k, cfg.get("cluster_size_slope"));
  const auto probs = derive_edge_probs(cfg.get("p_q_ratio"), cfg.get("avg_degree"),
                                       params.sizes);
  params.p = probs.p;
  params.q = probs.q;
  params.theta.resize(n);
  int offset = 0;
  const double a = cfg.get("power_exponent");
  for (int s : params.sizes) {
    params.theta.segment(offset, s) = sample_degree_propensities(s, a, rng);
    offset += s;
  }
  return params;
}

AttributedGraph realize_sbm(const SbmParams& params, Rng& rng) {
  const int k = static_cast<int>(params.sizes.size());
  std::vector<int> offsets(k + 1, 0);
  for (int b = 0; b < k; ++b) offsets[b + 1] = offsets[b] + params.sizes[b];
  const int n = offsets[k];
  if (params.theta.size() != n) throw InvalidArgument("theta length does not match sizes");

  std::vector<int> labels(n);
  for (int b = 0; b < k; ++b)
    std::fill(labels.begin() + offsets[b], labels.begin() + offsets[b + 1], b);

  auto flat = [&](int b) {
    const auto seg = params.theta.segment(offsets[b], params.sizes[b]);
    return (seg.array() == 1.0).all();
  };
  std::vector<bool> uniform(k);
  for (int b = 0; b < k; ++b) uniform[b] = flat(b);

  std::vector<Edge> edges;
  std::bernoulli_distribution coin;
  for (int a = 0; a < k; ++a) {
    for (int b = a; b < k; ++b) {
      const double base = a == b ? params.p : params.q;
      const int oa = offsets[a], sa = params.sizes[a];
      const int ob = offsets[b], sb = params.sizes[b];
      if (uniform[a] && uniform[b]) {
        const double prob = std::min(1.0, base);
        if (a == b) {
          // slot -> (i, j), i > j, row-major over the strict lower triangle
          geometric_skip(static_cast<std::int64_t>(sa) * (sa - 1) / 2, prob, rng,
                         [&, row = 1, row_start = std::int64_t{0}](std::int64_t slot) mutable {
                           while (slot >= row_start + row) {
                             row_start += row;
                             ++row;
                           }
                           edges.push_back({oa + static_cast<int>(slot - row_start), oa + row});
                         });
        } else {
          geometric_skip(static_cast<std::int64_t>(sa) * sb, prob, rng, [&](std::int64_t slot) {
            edges.push_back({oa + static_cast<int>(slot / sb), ob + static_cast<int>(slot % sb)});
          });
        }
        continue;
      }
      for (int i = 0; i < sa; ++i) {
        const int u = oa + i;
        for (int j = (a == b ? i + 1 : 0); j < sb; ++j) {
          const int v = ob + j;
          const double prob = std::min(1.0, params.theta[u] * params.theta[v] * base);
          if (prob <= 0.0) continue;
          if (coin(rng, std::bernoulli_distribution::param_type(prob))) edges.push_back({u, v});
        }
      }
    }
  }
  return AttributedGraph(n, std::move(edges), Eigen::MatrixXd(n, 0), std::move(labels));
}

AttributedGraph sample_sbm_graph(const GeneratorConfig& cfg, Rng& rng) {
  return realize_sbm(sample_sbm_params(cfg, rng), rng);
}

FeatureSample sample_features(const std::vector<int>& labels, double center_distance,
                              int feature_dim, Rng& rng) {
  if (center_distance < 0) throw InvalidArgument("center distance must be nonnegative");
  if (feature_dim < 1) throw InvalidArgument("feature dimension must be positive");
  const int k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::normal_distribution<double> normal(0.0, 1.0);
  FeatureSample out;
  out.centers.resize(k, feature_dim);
  for (int c = 0; c < k; ++c)
    for (int d = 0; d < feature_dim; ++d) out.centers(c, d) = center_distance * normal(rng);
  const int n = static_cast<int>(labels.size());
  out.features.resize(n, feature_dim);
  for (int v = 0; v < n; ++v)
    for (int d = 0; d < feature_dim; ++d)
      out.features(v, d) = out.centers(labels[v], d) + normal(rng);
  return out;
}

AttributedGraph sample_attributed_sbm(const GeneratorConfig& cfg, Rng& rng) {
  auto graph = sample_sbm_graph(cfg, rng);
  const int dim = cfg.find("feature_dim") ? static_cast<int>(cfg.get_int("feature_dim"))
                                          : kDefaultFeatureDim;
  auto sample = sample_features(graph.labels(), cfg.get("feature_center_distance"), dim, rng);
  return graph.with_features(std::move(sample.features));
}

AttributedGraph sample_er_graph(int num_vertices, double edge_prob, Rng& rng) {
  if (num_vertices < 1) throw InvalidArgument("ER graph needs at least one vertex");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0))
    throw InvalidArgument("edge probability must lie in [0, 1]");
  std::vector<Edge> edges;
  geometric_skip(static_cast<std::int64_t>(num_vertices) * (num_vertices - 1) / 2, edge_prob,
                 rng, [&, row = 1, row_start = std::int64_t{0}](std::int64_t slot) mutable {
                   while (slot >= row_start + row) {
                     row_start += row;
                     ++row;
                   }
                   edges.push_back({static_cast<int>(slot - row_start), row});
                 });
  return AttributedGraph(num_vertices, std::move(edges),
                         Eigen::MatrixXd::Ones(num_vertices, 1));
}

std::int64_t count_tailed_triangles(const AttributedGraph& g) {
  const auto tri = triangles_per_node(g);
  std::int64_t total = 0;
  for (int v = 0; v < g.num_nodes(); ++v) total += tri[v] * (g.degree(v) - 2);
  return total;
}

}  // namespace graphpop
