#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphpop/generators.hpp"
#include "graphpop/graph.hpp"

namespace graphpop {

enum class ModelTag { PPR, HEURISTIC, LINREG, MLP, GCN, SGC, APPNP, GIN };

std::string_view to_string(ModelTag tag);
ModelTag model_tag_from_string(std::string_view name);

/// Trainable message-passing (or feature-only) models.
bool is_neural(ModelTag tag);

/// PPR is NC-only, HEURISTIC is LP-only, LINREG is GPP-only; the neural
/// models apply to every task.
bool applies_to(ModelTag tag, Task task);

/// Models run by default on a task, in roster order.
std::vector<ModelTag> default_roster(Task task);

enum class HyperAxis { LearningRate, HiddenChannels, NumLayers, Dropout, Alpha, Iterations };

/// All axes in canonical order.
const std::vector<HyperAxis>& all_hyper_axes();
std::string_view to_string(HyperAxis axis);
HyperAxis hyper_axis_from_string(std::string_view name);
bool is_integer_axis(HyperAxis axis);

/// Axes a model reads, in canonical order.
std::vector<HyperAxis> applicable_axes(ModelTag tag);

/// The published grid for one axis.
std::vector<double> grid_values(HyperAxis axis);

/// One point of a model's hyperparameter space. Axes a model does not read
/// stay empty.
struct HyperConfig {
  std::optional<double> learning_rate;
  std::optional<int> hidden_channels;
  std::optional<int> num_layers;
  std::optional<double> dropout;
  std::optional<double> alpha;
  std::optional<int> iterations;

  std::optional<double> get(HyperAxis axis) const;
  void set(HyperAxis axis, double value);

  /// Compact JSON over the present axes in canonical order. Used for
  /// grouping and as the deterministic tie-break order.
  std::string canonical() const;

  friend bool operator==(const HyperConfig&, const HyperConfig&) = default;
};

Json to_json(const HyperConfig& cfg);
HyperConfig hyper_config_from_json(const Json& j);

/// Throws ConfigError if an axis the model reads is missing or out of its
/// domain, or if an axis the model ignores is set.
void validate_for(const HyperConfig& cfg, ModelTag tag);

}  // namespace graphpop
