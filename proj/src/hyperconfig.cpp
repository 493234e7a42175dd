#include "graphpop/hyperconfig.hpp"

#include <algorithm>
#include <cmath>

#include "graphpop/errors.hpp"
#include "graphpop/metrics.hpp"

namespace graphpop {

std::string_view to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::PPR: return "PPR";
    case ModelTag::HEURISTIC: return "HEURISTIC";
    case ModelTag::LINREG: return "LINREG";
    case ModelTag::MLP: return "MLP";
    case ModelTag::GCN: return "GCN";
    case ModelTag::SGC: return "SGC";
    case ModelTag::APPNP: return "APPNP";
    case ModelTag::GIN: return "GIN";
  }
  return "?";
}

ModelTag model_tag_from_string(std::string_view name) {
  for (auto tag : {ModelTag::PPR, ModelTag::HEURISTIC, ModelTag::LINREG, ModelTag::MLP,
                   ModelTag::GCN, ModelTag::SGC, ModelTag::APPNP, ModelTag::GIN})
    if (to_string(tag) == name) return tag;
  throw ConfigError("unknown model tag '" + std::string(name) + "'");
}

MetricKind metric_kind_from_string(std::string_view name) {
  for (auto kind : {MetricKind::AUC_OVR, MetricKind::AUC_LP, MetricKind::SCALED_MSE})
    if (to_string(kind) == name) return kind;
  throw ConfigError("unknown metric '" + std::string(name) + "'");
}

bool is_neural(ModelTag tag) {
  switch (tag) {
    case ModelTag::MLP:
    case ModelTag::GCN:
    case ModelTag::SGC:
    case ModelTag::APPNP:
    case ModelTag::GIN:
      return true;
    default:
      return false;
  }
}

bool applies_to(ModelTag tag, Task task) {
  switch (tag) {
    case ModelTag::PPR: return task == Task::NC;
    case ModelTag::HEURISTIC: return task == Task::LP;
    case ModelTag::LINREG: return task == Task::GPP;
    default: return true;
  }
}

std::vector<ModelTag> default_roster(Task task) {
  ModelTag baseline = task == Task::NC   ? ModelTag::PPR
                      : task == Task::LP ? ModelTag::HEURISTIC
                                         : ModelTag::LINREG;
  return {baseline,      ModelTag::MLP,   ModelTag::GCN,
          ModelTag::SGC, ModelTag::APPNP, ModelTag::GIN};
}

const std::vector<HyperAxis>& all_hyper_axes() {
  static const std::vector<HyperAxis> axes = {
      HyperAxis::LearningRate, HyperAxis::HiddenChannels, HyperAxis::NumLayers,
      HyperAxis::Dropout,      HyperAxis::Alpha,          HyperAxis::Iterations};
  return axes;
}

std::string_view to_string(HyperAxis axis) {
  switch (axis) {
    case HyperAxis::LearningRate: return "learning_rate";
    case HyperAxis::HiddenChannels: return "hidden_channels";
    case HyperAxis::NumLayers: return "num_layers";
    case HyperAxis::Dropout: return "dropout";
    case HyperAxis::Alpha: return "alpha";
    case HyperAxis::Iterations: return "iterations";
  }
  return "?";
}

HyperAxis hyper_axis_from_string(std::string_view name) {
  for (auto axis : all_hyper_axes())
    if (to_string(axis) == name) return axis;
  throw ConfigError("unknown hyperparameter '" + std::string(name) + "'");
}

bool is_integer_axis(HyperAxis axis) {
  return axis == HyperAxis::HiddenChannels || axis == HyperAxis::NumLayers ||
         axis == HyperAxis::Iterations;
}

std::vector<HyperAxis> applicable_axes(ModelTag tag) {
  using A = HyperAxis;
  switch (tag) {
    case ModelTag::PPR: return {A::Alpha};
    case ModelTag::HEURISTIC:
    case ModelTag::LINREG: return {};
    case ModelTag::MLP:
    case ModelTag::GCN:
    case ModelTag::GIN: return {A::LearningRate, A::HiddenChannels, A::NumLayers, A::Dropout};
    case ModelTag::SGC: return {A::LearningRate, A::Iterations};
    case ModelTag::APPNP:
      return {A::LearningRate, A::HiddenChannels, A::NumLayers,
              A::Dropout,      A::Alpha,          A::Iterations};
  }
  return {};
}

std::vector<double> grid_values(HyperAxis axis) {
  switch (axis) {
    case HyperAxis::LearningRate: return {0.01, 0.001, 0.0001};
    case HyperAxis::HiddenChannels: return {4, 8, 16};
    case HyperAxis::NumLayers: return {1, 2, 3, 4};
    case HyperAxis::Dropout: return {0, 0.3, 0.5, 0.8};
    case HyperAxis::Alpha: return {0.1, 0.2, 0.3};
    case HyperAxis::Iterations: return {5, 10, 15};
  }
  return {};
}

std::optional<double> HyperConfig::get(HyperAxis axis) const {
  auto widen = [](const std::optional<int>& v) -> std::optional<double> {
    if (v) return static_cast<double>(*v);
    return std::nullopt;
  };
  switch (axis) {
    case HyperAxis::LearningRate: return learning_rate;
    case HyperAxis::HiddenChannels: return widen(hidden_channels);
    case HyperAxis::NumLayers: return widen(num_layers);
    case HyperAxis::Dropout: return dropout;
    case HyperAxis::Alpha: return alpha;
    case HyperAxis::Iterations: return widen(iterations);
  }
  return std::nullopt;
}

void HyperConfig::set(HyperAxis axis, double value) {
  switch (axis) {
    case HyperAxis::LearningRate: learning_rate = value; break;
    case HyperAxis::HiddenChannels: hidden_channels = static_cast<int>(std::lround(value)); break;
    case HyperAxis::NumLayers: num_layers = static_cast<int>(std::lround(value)); break;
    case HyperAxis::Dropout: dropout = value; break;
    case HyperAxis::Alpha: alpha = value; break;
    case HyperAxis::Iterations: iterations = static_cast<int>(std::lround(value)); break;
  }
}

std::string HyperConfig::canonical() const { return to_json(*this).dump(); }

Json to_json(const HyperConfig& cfg) {
  Json out = Json::object();
  for (auto axis : all_hyper_axes()) {
    const auto v = cfg.get(axis);
    if (!v) continue;
    if (is_integer_axis(axis))
      out[std::string(to_string(axis))] = static_cast<std::int64_t>(std::llround(*v));
    else
      out[std::string(to_string(axis))] = *v;
  }
  return out;
}

HyperConfig hyper_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("hyper_config must be an object");
  HyperConfig cfg;
  for (const auto& [name, value] : j.items()) {
    const auto axis = hyper_axis_from_string(name);
    if (!value.is_number()) throw ConfigError("hyperparameter '" + name + "' must be numeric");
    const double v = value.get<double>();
    if (is_integer_axis(axis) && v != std::floor(v))
      throw ConfigError("hyperparameter '" + name + "' must be an integer");
    cfg.set(axis, v);
  }
  return cfg;
}

void validate_for(const HyperConfig& cfg, ModelTag tag) {
  const auto axes = applicable_axes(tag);
  for (auto axis : all_hyper_axes()) {
    const bool wanted = std::find(axes.begin(), axes.end(), axis) != axes.end();
    const auto v = cfg.get(axis);
    const std::string name(to_string(axis));
    if (wanted && !v)
      throw ConfigError(std::string(to_string(tag)) + " needs hyperparameter " + name);
    if (!wanted && v)
      throw ConfigError(std::string(to_string(tag)) + " does not use hyperparameter " + name);
    if (!v) continue;
    bool ok = true;
    switch (axis) {
      case HyperAxis::LearningRate: ok = *v > 0; break;
      case HyperAxis::HiddenChannels:
      case HyperAxis::NumLayers: ok = *v >= 1; break;
      case HyperAxis::Dropout: ok = *v >= 0 && *v < 1; break;
      case HyperAxis::Alpha: ok = *v > 0 && *v <= 1; break;
      case HyperAxis::Iterations: ok = *v >= 0; break;
    }
    if (!ok) throw ConfigError("hyperparameter " + name + " out of range");
  }
}

}  // namespace graphpop
