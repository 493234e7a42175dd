#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "graphpop/graph.hpp"
#include "graphpop/rng.hpp"

namespace graphpop {

enum class Task { NC, LP, GPP };

std::string_view to_string(Task task);
Task task_from_string(std::string_view name);

/// Feature dimension used when a config does not carry `feature_dim`.
inline constexpr int kDefaultFeatureDim = 16;

/// Generator parameter names, in canonical order, for a task.
/// NC/LP: nvertex, p_q_ratio, avg_degree, feature_center_distance,
/// num_clusters, cluster_size_slope, power_exponent.
/// GPP: ngraphs, num_vertices, edge_prob, train_prob.
const std::vector<std::string>& generator_parameters(Task task);

/// Whether a parameter takes integral values.
bool is_integer_parameter(std::string_view name);

struct ParamRange {
  double min = 0.0;
  double max = 0.0;
  bool integer = false;

  friend bool operator==(const ParamRange&, const ParamRange&) = default;
};

/// Box of generator parameters for one task, kept in canonical order.
struct ParamSpace {
  Task task = Task::NC;
  std::vector<std::pair<std::string, ParamRange>> ranges;

  const ParamRange& at(std::string_view name) const;
  bool contains(std::string_view name) const;

  /// Throws ConfigError unless min <= max everywhere and the parameter set is
  /// exactly the task's (NC/LP may additionally carry feature_dim).
  void validate() const;

  friend bool operator==(const ParamSpace&, const ParamSpace&) = default;
};

/// Published sampling ranges: NC/LP from the generator table, GPP from the
/// motif-world table.
ParamSpace default_param_space(Task task);

/// One sampled point of a ParamSpace, in canonical parameter order.
class GeneratorConfig {
 public:
  GeneratorConfig() = default;
  explicit GeneratorConfig(std::vector<std::pair<std::string, double>> values)
      : values_(std::move(values)) {}

  double get(std::string_view name) const;
  std::optional<double> find(std::string_view name) const;
  std::int64_t get_int(std::string_view name) const;
  void set(std::string_view name, double value);

  const std::vector<std::pair<std::string, double>>& values() const noexcept {
    return values_;
  }

  friend bool operator==(const GeneratorConfig&, const GeneratorConfig&) = default;

 private:
  std::vector<std::pair<std::string, double>> values_;
};

Json to_json(const GeneratorConfig& cfg);
GeneratorConfig generator_config_from_json(const Json& j);
Json to_json(const ParamSpace& space);
ParamSpace param_space_from_json(Task task, const Json& j);

/// Independent uniform draw per parameter (inclusive integer draw for
/// integral parameters), in canonical parameter order.
GeneratorConfig sample_generator_config(const ParamSpace& space, Rng& rng);

/// Largest-remainder apportionment of n over weights 1 + slope*i, ties to the
/// higher index. Sizes are nondecreasing, sum to n and are each >= 1; a
/// cluster left empty by the rounding borrows one node from the largest.
std::vector<int> sample_cluster_sizes(int n, int k, double slope);

/// u^(1/a) for u ~ U(0,1], rescaled to block mean 1.
Eigen::VectorXd sample_degree_propensities(int block_size, double power_exponent,
                                           Rng& rng);

struct EdgeProbabilities {
  double p = 0.0;  ///< within block
  double q = 0.0;  ///< between blocks
};

/// Inverts the expected-degree equation for (p, q) given the p/q ratio and the
/// target average degree, with unit mean propensities.
EdgeProbabilities derive_edge_probs(double p_q_ratio, double avg_degree,
                                    const std::vector<int>& sizes);

/// Fully resolved DC-SBM: block sizes, block probabilities, node propensities
/// and feature cluster centers (one row per block).
struct SbmParams {
  std::vector<int> sizes;
  double p = 0.0;
  double q = 0.0;
  Eigen::VectorXd theta;
  Eigen::MatrixXd centers;
};

/// Block sizes, (p, q) and propensities for a NC/LP config. Centers are left
/// empty; sample_features draws them.
SbmParams sample_sbm_params(const GeneratorConfig& cfg, Rng& rng);

/// Realizes edges and labels of an SBM. Nodes of block 0 come first. Pair
/// probability is min(1, theta_u theta_v B). Block pairs with constant
/// propensities use geometric skipping, otherwise one Bernoulli per pair.
AttributedGraph realize_sbm(const SbmParams& params, Rng& rng);

/// sample_sbm_params + realize_sbm; features unset.
AttributedGraph sample_sbm_graph(const GeneratorConfig& cfg, Rng& rng);

struct FeatureSample {
  Eigen::MatrixXd features;  ///< n x d
  Eigen::MatrixXd centers;   ///< k x d
};

/// Centers ~ N(0, center_distance^2 I), features ~ N(center, I).
/// center_distance is the standard deviation of the center prior.
FeatureSample sample_features(const std::vector<int>& labels, double center_distance,
                              int feature_dim, Rng& rng);

/// DC-SBM graph with Gaussian cluster features: the NC/LP world sample.
AttributedGraph sample_attributed_sbm(const GeneratorConfig& cfg, Rng& rng);

/// G(n, p) with the dummy 1-d feature [1.0] on every node and no labels.
AttributedGraph sample_er_graph(int num_vertices, double edge_prob, Rng& rng);

/// Non-induced tailed triangles: sum over triangles T of sum_{v in T} (deg v - 2).
std::int64_t count_tailed_triangles(const AttributedGraph& g);

}  // namespace graphpop
