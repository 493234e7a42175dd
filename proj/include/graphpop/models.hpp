#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "graphpop/graph.hpp"
#include "graphpop/hyperconfig.hpp"
#include "graphpop/layers.hpp"
#include "graphpop/metrics.hpp"
#include "graphpop/tasks.hpp"

namespace graphpop {

// ---- baselines -------------------------------------------------------------

enum class HeuristicScheme {
  SORENSEN_DICE,
  COSINE,
  HUB_PROMOTED,
  HUB_SUPPRESSED,
  JACCARD,
  ADAMIC_ADAR,
  RESOURCE_ALLOCATION,
  LEICHT_HOLME_NEWMAN
};

const std::vector<HeuristicScheme>& all_heuristic_schemes();
std::string_view to_string(HeuristicScheme scheme);
HeuristicScheme heuristic_scheme_from_string(std::string_view name);

/// Reweighted common-neighbor count of (u, v) on `g`. Degenerate
/// denominators contribute 0, as do Adamic-Adar terms with ln d <= 0.
double lp_heuristic_score(const AttributedGraph& g, int u, int v, HeuristicScheme scheme);

/// Personalized PageRank with restart probability `alpha` to the uniform
/// distribution over `seeds`. Dangling nodes restart to the seeds.
Eigen::VectorXd ppr_scores(const AttributedGraph& g, std::span<const int> seeds, double alpha);

/// n x k matrix of PPR mass seeded by each class's training nodes.
Eigen::MatrixXd ppr_class_masses(const AttributedGraph& g, std::span<const int> train,
                                 double alpha);

/// Argmax over class masses, ties to the lowest class.
std::vector<int> ppr_classify(const AttributedGraph& g, std::span<const int> train,
                              double alpha);

struct HeuristicChoice {
  HeuristicScheme scheme = HeuristicScheme::SORENSEN_DICE;
  double tune_auc = 0.0;
  MetricValue test;
};

/// Picks the scheme with the best tune AUC (ties to the lowest scheme) and
/// reports its test AUC.
HeuristicChoice heuristic_lp_baseline(const LpDataset& dataset);

/// 2m / (n (n - 1)); 0 for graphs with fewer than two nodes.
double edge_density(const AttributedGraph& g);

struct OlsFit {
  double intercept = 0.0;
  double slope = 0.0;
  bool fallback = false;  ///< design was singular; intercept is the target mean
};

/// Closed-form y = b0 + b1 x. A constant x falls back to the mean of y.
OlsFit fit_ols(std::span<const double> x, std::span<const double> y);

MetricValue linreg_density(const GppDataset& dataset);

// ---- train / evaluate ------------------------------------------------------

struct TrainOptions {
  int epochs = 200;
};

/// Everything needed to score a dataset. Neural models carry parameter
/// tensors; baselines carry their fitted state.
struct TrainedModel {
  ModelTag tag = ModelTag::MLP;
  Task task = Task::NC;
  HyperConfig hyper;
  std::uint64_t seed = 0;
  Architecture arch;
  std::vector<Eigen::MatrixXd> parameters;
  std::optional<HeuristicScheme> scheme;
  std::optional<OlsFit> ols;
  double target_mean = 0.0;   ///< GPP target standardization
  double target_scale = 1.0;
};

/// Resolves the neural architecture for a model on a dataset.
Architecture make_architecture(ModelTag tag, const HyperConfig& hyper,
                               const TaskDataset& dataset);

/// Throws ConfigError if the model does not apply to the task or the hyper
/// config does not fit the model, NonFinite if training diverges.
TrainedModel train_model(ModelTag tag, const HyperConfig& hyper, const TaskDataset& dataset,
                         std::uint64_t seed, const TrainOptions& options = {});

/// NC: per-node class scores (softmax or PPR masses), n x k.
Eigen::MatrixXd node_class_scores(const TrainedModel& model, const NcDataset& dataset);
/// LP: one score per pair.
std::vector<double> link_scores(const TrainedModel& model, const LpDataset& dataset,
                                std::span<const Edge> pairs);
/// GPP: one prediction per listed graph, in target units.
std::vector<double> graph_predictions(const TrainedModel& model, const GppDataset& dataset,
                                      std::span<const int> indices);

MetricValue evaluate(const TrainedModel& model, const TaskDataset& dataset,
                     Split split = Split::Test);

/// Scaled MSE of predicting the evaluated targets' mean.
MetricValue evaluate_mean_predictor(const GppDataset& dataset, Split split = Split::Test);

/// Process-wide allocator setting for training-heavy executables: stop glibc
/// from returning freed heap to the OS after every epoch's tape. Each epoch
/// otherwise page-faults its whole tape back in, which doubles GCN and GIN
/// epoch times. No-op on other C libraries.
void retain_freed_heap();

}  // namespace graphpop
