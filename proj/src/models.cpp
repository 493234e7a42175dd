#include <cmath>
#include <random>
#include <string>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "graphpop/autodiff.hpp"
#include "graphpop/errors.hpp"
#include "graphpop/models.hpp"

namespace graphpop {
namespace {

constexpr int kSgcEmbeddingWidth = 16;

/// Operators and inputs of one forward pass; must outlive any tape built
/// over it.
struct Workspace {
  GraphOperators<double> ops;
  Eigen::MatrixXd x;
  ad::Sparse<double> pool;
};

Workspace node_workspace(const AttributedGraph& g) {
  return {make_operators<double>(g), g.features(), {}};
}

Workspace graph_workspace(const GppDataset& ds, std::span<const int> indices) {
  std::vector<AttributedGraph> selected;
  std::vector<int> sizes;
  selected.reserve(indices.size());
  for (int i : indices) {
    selected.push_back(ds.graphs[i]);
    sizes.push_back(ds.graphs[i].num_nodes());
  }
  const AttributedGraph joined = disjoint_union(selected);
  return {make_operators<double>(joined), joined.features(), mean_pool_operator<double>(sizes)};
}

/// SGC's propagation is parameter-free: fold it into the workspace input
/// and drop the iterations from the architecture.
Architecture fold_sgc(Architecture arch, Workspace& ws) {
  if (arch.tag != ModelTag::SGC || arch.iterations == 0) return arch;
  ws.x = sgc_propagate(ws.ops, std::move(ws.x), arch.iterations);
  arch.iterations = 0;
  return arch;
}

ad::Var forward(ad::Tape<double>& tape, const Architecture& arch,
                std::span<const ad::Var> params, const Workspace& ws, ad::Var x,
                const Dropout<double>& dropout) {
  if (arch.readout) return forward_graphs(tape, arch, params, ws.ops, ws.pool, x, dropout);
  return forward_nodes(tape, arch, params, ws.ops, x, dropout);
}

/// Inference pass with dropout off.
Eigen::MatrixXd infer(const TrainedModel& model, Workspace ws) {
  const Architecture arch = fold_sgc(model.arch, ws);
  ad::Tape<double> tape;
  std::vector<ad::Var> vars;
  vars.reserve(model.parameters.size());
  for (const auto& p : model.parameters) vars.push_back(tape.constant(p));
  const ad::Var x = tape.constant(ws.x);
  return tape.value(forward(tape, arch, vars, ws, x, {}));
}

const GppDataset& as_gpp(const TaskDataset& d) { return std::get<GppDataset>(d); }

/// Adam with the usual (0.9, 0.999, 1e-8) moments and bias correction.
class Adam {
 public:
  Adam(const std::vector<Eigen::MatrixXd>& params, double lr) : lr_(lr) {
    for (const auto& p : params) {
      m_.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
      v_.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
    }
  }

  void step(std::vector<Eigen::MatrixXd>& params, const std::vector<Eigen::MatrixXd>& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, t_);
    const double c2 = 1.0 - std::pow(kBeta2, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = kBeta1 * m_[i] + (1 - kBeta1) * grads[i];
      v_[i] = kBeta2 * v_[i] + (1 - kBeta2) * grads[i].cwiseAbs2();
      params[i].array() -=
          lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + kEps);
    }
  }

 private:
  static constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  double lr_;
  int t_ = 0;
  std::vector<Eigen::MatrixXd> m_, v_;
};

std::vector<Edge> sample_training_negatives(const AttributedGraph& g, std::size_t count,
                                            Rng& rng) {
  const int n = g.num_nodes();
  std::uniform_int_distribution<int> node(0, n - 1);
  std::vector<Edge> out;
  out.reserve(count);
  while (out.size() < count) {
    int u = node(rng), v = node(rng);
    if (u == v || g.has_edge(u, v)) continue;
    if (u > v) std::swap(u, v);
    out.push_back({u, v});
  }
  return out;
}

void train_neural(TrainedModel& model, const TaskDataset& dataset, const TrainOptions& options) {
  Rng rng(model.seed);
  model.parameters = init_parameters<double>(model.arch, rng);
  if (options.epochs <= 0) return;

  Workspace ws;
  std::vector<int> nc_rows, nc_labels;
  std::vector<Edge> lp_pos;
  const AttributedGraph* lp_graph = nullptr;
  Eigen::MatrixXd gpp_targets;

  switch (model.task) {
    case Task::NC: {
      const auto& ds = std::get<NcDataset>(dataset);
      ws = node_workspace(ds.graph);
      nc_rows = ds.train;
      for (int v : nc_rows) nc_labels.push_back(ds.graph.labels()[v]);
      break;
    }
    case Task::LP: {
      const auto& ds = std::get<LpDataset>(dataset);
      ws = node_workspace(ds.train_graph);
      lp_pos = ds.train;
      lp_graph = &ds.train_graph;
      break;
    }
    case Task::GPP: {
      const auto& ds = as_gpp(dataset);
      ws = graph_workspace(ds, ds.train);
      gpp_targets.resize(static_cast<Eigen::Index>(ds.train.size()), 1);
      for (std::size_t i = 0; i < ds.train.size(); ++i)
        gpp_targets(static_cast<Eigen::Index>(i), 0) =
            (ds.targets[ds.train[i]] - model.target_mean) / model.target_scale;
      break;
    }
  }

  const Architecture arch = fold_sgc(model.arch, ws);
  Adam adam(model.parameters, *model.hyper.learning_rate);
  Eigen::MatrixXd lp_targets;
  if (model.task == Task::LP) {
    lp_targets = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(2 * lp_pos.size()), 1);
    lp_targets.topRows(static_cast<Eigen::Index>(lp_pos.size())).setOnes();
  }
  const Dropout<double> dropout{model.arch.dropout, &rng};
  std::vector<Eigen::MatrixXd> grads(model.parameters.size());

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    ad::Tape<double> tape;
    std::vector<ad::Var> vars;
    vars.reserve(model.parameters.size());
    for (const auto& p : model.parameters) vars.push_back(tape.variable(p));
    const ad::Var x = tape.constant(ws.x);
    const ad::Var out = forward(tape, arch, vars, ws, x, dropout);

    ad::Var loss;
    switch (model.task) {
      case Task::NC:
        loss = ad::softmax_cross_entropy(tape, out, nc_rows, nc_labels);
        break;
      case Task::LP: {
        std::vector<Edge> pairs = lp_pos;
        const auto neg = sample_training_negatives(*lp_graph, lp_pos.size(), rng);
        pairs.insert(pairs.end(), neg.begin(), neg.end());
        loss = ad::bce_with_logits(tape, ad::pair_dot(tape, out, std::move(pairs)), lp_targets);
        break;
      }
      case Task::GPP:
        loss = ad::mse(tape, out, gpp_targets);
        break;
    }
    const double value = tape.value(loss)(0, 0);
    if (!std::isfinite(value))
      throw NonFinite(std::string(to_string(model.tag)) + " loss became non-finite at epoch " +
                      std::to_string(epoch));
    tape.backward(loss);
    for (std::size_t i = 0; i < vars.size(); ++i) grads[i] = tape.grad(vars[i]);
    adam.step(model.parameters, grads);
  }
  for (const auto& p : model.parameters)
    if (!p.allFinite())
      throw NonFinite(std::string(to_string(model.tag)) + " parameters became non-finite");
}

}  // namespace

Architecture make_architecture(ModelTag tag, const HyperConfig& hyper,
                               const TaskDataset& dataset) {
  if (!is_neural(tag)) throw ConfigError(std::string(to_string(tag)) + " is not a neural model");
  Architecture arch;
  arch.tag = tag;
  arch.hidden = hyper.hidden_channels.value_or(kSgcEmbeddingWidth);
  arch.layers = hyper.num_layers.value_or(1);
  arch.iterations = hyper.iterations.value_or(0);
  arch.alpha = hyper.alpha.value_or(0.1);
  arch.dropout = hyper.dropout.value_or(0.0);
  switch (task_of(dataset)) {
    case Task::NC: {
      const auto& g = std::get<NcDataset>(dataset).graph;
      arch.in_dim = g.feature_dim();
      arch.out_dim = g.num_classes();
      break;
    }
    case Task::LP:
      arch.in_dim = std::get<LpDataset>(dataset).train_graph.feature_dim();
      arch.out_dim = arch.hidden;
      break;
    case Task::GPP: {
      const auto& ds = as_gpp(dataset);
      if (ds.graphs.empty()) throw InvalidArgument("GPP dataset has no graphs");
      arch.in_dim = ds.graphs.front().feature_dim();
      arch.out_dim = arch.hidden;
      arch.readout = true;
      break;
    }
  }
  if (arch.in_dim < 1) throw ConfigError("neural models need at least one feature column");
  return arch;
}

TrainedModel train_model(ModelTag tag, const HyperConfig& hyper, const TaskDataset& dataset,
                         std::uint64_t seed, const TrainOptions& options) {
  const Task task = task_of(dataset);
  if (!applies_to(tag, task))
    throw ConfigError(std::string(to_string(tag)) + " does not apply to " +
                      std::string(to_string(task)));
  validate_for(hyper, tag);

  TrainedModel model;
  model.tag = tag;
  model.task = task;
  model.hyper = hyper;
  model.seed = seed;

  switch (tag) {
    case ModelTag::PPR:
      return model;
    case ModelTag::HEURISTIC:
      model.scheme = heuristic_lp_baseline(std::get<LpDataset>(dataset)).scheme;
      return model;
    case ModelTag::LINREG: {
      const auto& ds = as_gpp(dataset);
      std::vector<double> x, y;
      for (int i : ds.train) {
        x.push_back(edge_density(ds.graphs[i]));
        y.push_back(ds.targets[i]);
      }
      model.ols = fit_ols(x, y);
      return model;
    }
    default:
      break;
  }

  model.arch = make_architecture(tag, hyper, dataset);
  if (task == Task::GPP) {
    const auto& ds = as_gpp(dataset);
    if (ds.train.empty()) throw InvalidArgument("GPP dataset has no training graphs");
    double mean = 0, sq = 0;
    for (int i : ds.train) mean += ds.targets[i];
    mean /= static_cast<double>(ds.train.size());
    for (int i : ds.train) sq += (ds.targets[i] - mean) * (ds.targets[i] - mean);
    const double sd = std::sqrt(sq / static_cast<double>(ds.train.size()));
    model.target_mean = mean;
    model.target_scale = sd > 0 ? sd : 1.0;
  }
  train_neural(model, dataset, options);
  return model;
}

Eigen::MatrixXd node_class_scores(const TrainedModel& model, const NcDataset& dataset) {
  if (model.tag == ModelTag::PPR)
    return ppr_class_masses(dataset.graph, dataset.train, *model.hyper.alpha);
  if (!is_neural(model.tag)) throw ConfigError("model cannot score nodes");
  return ad::softmax_rows(infer(model, node_workspace(dataset.graph)));
}

std::vector<double> link_scores(const TrainedModel& model, const LpDataset& dataset,
                                std::span<const Edge> pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  if (model.tag == ModelTag::HEURISTIC) {
    for (const auto& e : pairs)
      out.push_back(lp_heuristic_score(dataset.train_graph, e.u, e.v, *model.scheme));
    return out;
  }
  if (!is_neural(model.tag)) throw ConfigError("model cannot score links");
  const Eigen::MatrixXd h = infer(model, node_workspace(dataset.train_graph));
  for (const auto& e : pairs) out.push_back(h.row(e.u).dot(h.row(e.v)));
  return out;
}

std::vector<double> graph_predictions(const TrainedModel& model, const GppDataset& dataset,
                                      std::span<const int> indices) {
  std::vector<double> out;
  out.reserve(indices.size());
  if (model.tag == ModelTag::LINREG) {
    for (int i : indices)
      out.push_back(model.ols->intercept + model.ols->slope * edge_density(dataset.graphs[i]));
    return out;
  }
  if (!is_neural(model.tag)) throw ConfigError("model cannot score graphs");
  if (indices.empty()) return out;
  const Eigen::MatrixXd pred = infer(model, graph_workspace(dataset, indices));
  for (Eigen::Index i = 0; i < pred.rows(); ++i)
    out.push_back(pred(i, 0) * model.target_scale + model.target_mean);
  return out;
}

MetricValue evaluate(const TrainedModel& model, const TaskDataset& dataset, Split split) {
  if (task_of(dataset) != model.task) throw ConfigError("model was trained for another task");
  switch (model.task) {
    case Task::NC: {
      const auto& ds = std::get<NcDataset>(dataset);
      const Eigen::MatrixXd scores = node_class_scores(model, ds);
      const auto& rows = ds.nodes(split);
      Eigen::MatrixXd picked(static_cast<Eigen::Index>(rows.size()), scores.cols());
      std::vector<int> labels;
      labels.reserve(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        picked.row(static_cast<Eigen::Index>(i)) = scores.row(rows[i]);
        labels.push_back(ds.graph.labels()[rows[i]]);
      }
      return {MetricKind::AUC_OVR, roc_auc_ovr(picked, labels)};
    }
    case Task::LP: {
      const auto& ds = std::get<LpDataset>(dataset);
      const auto& pos = ds.positives(split);
      const auto& neg = ds.negatives(split);
      std::vector<Edge> pairs = pos;
      pairs.insert(pairs.end(), neg.begin(), neg.end());
      const auto scores = link_scores(model, ds, pairs);
      std::vector<int> labels(pairs.size(), 0);
      std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(pos.size()), 1);
      return {MetricKind::AUC_LP, roc_auc(scores, labels)};
    }
    case Task::GPP: {
      const auto& ds = as_gpp(dataset);
      const auto preds = graph_predictions(model, ds, ds.indices(split));
      return {MetricKind::SCALED_MSE, scaled_mse(preds, ds.targets_of(split))};
    }
  }
  throw InvalidArgument("unknown task");
}

MetricValue evaluate_mean_predictor(const GppDataset& dataset, Split split) {
  const auto targets = dataset.targets_of(split);
  const auto preds = mean_predictions(std::span<const double>(targets));
  return {MetricKind::SCALED_MSE, scaled_mse(preds, targets)};
}

void retain_freed_heap() {
#if defined(__GLIBC__)
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  mallopt(M_TOP_PAD, 64 << 20);
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
#endif
}

}  // namespace graphpop
