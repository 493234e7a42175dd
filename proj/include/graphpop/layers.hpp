#pragma once

#include <cmath>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "graphpop/autodiff.hpp"
#include "graphpop/errors.hpp"
#include "graphpop/graph.hpp"
#include "graphpop/hyperconfig.hpp"
#include "graphpop/rng.hpp"

namespace graphpop {

/// Shape of a neural model, resolved from a HyperConfig and a task.
struct Architecture {
  ModelTag tag = ModelTag::MLP;
  int in_dim = 1;
  int hidden = 16;
  int out_dim = 1;
  int layers = 2;
  int iterations = 0;   ///< SGC power / APPNP propagation steps
  double alpha = 0.1;   ///< APPNP teleport
  double dropout = 0.0;
  bool readout = false; ///< graph-level linear readout after mean pooling

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

/// Message-passing operators of one graph.
template <typename Scalar>
struct GraphOperators {
  ad::Sparse<Scalar> normalized;  ///< D~^-1/2 (A + I) D~^-1/2
  ad::Sparse<Scalar> summed;      ///< A + I (GIN with eps = 0)
};

template <typename Scalar>
ad::Sparse<Scalar> normalized_adjacency(const AttributedGraph& g) {
  const int n = g.num_nodes();
  std::vector<Scalar> inv_sqrt(n);
  for (int v = 0; v < n; ++v) inv_sqrt[v] = Scalar(1) / std::sqrt(Scalar(g.degree(v) + 1));
  std::vector<Eigen::Triplet<Scalar>> entries;
  entries.reserve(n + 2 * g.edges().size());
  for (int v = 0; v < n; ++v) entries.emplace_back(v, v, inv_sqrt[v] * inv_sqrt[v]);
  for (const auto& e : g.edges()) {
    const Scalar w = inv_sqrt[e.u] * inv_sqrt[e.v];
    entries.emplace_back(e.u, e.v, w);
    entries.emplace_back(e.v, e.u, w);
  }
  ad::Sparse<Scalar> s(n, n);
  s.setFromTriplets(entries.begin(), entries.end());
  return s;
}

template <typename Scalar>
ad::Sparse<Scalar> self_loop_adjacency(const AttributedGraph& g) {
  const int n = g.num_nodes();
  std::vector<Eigen::Triplet<Scalar>> entries;
  entries.reserve(n + 2 * g.edges().size());
  for (int v = 0; v < n; ++v) entries.emplace_back(v, v, Scalar(1));
  for (const auto& e : g.edges()) {
    entries.emplace_back(e.u, e.v, Scalar(1));
    entries.emplace_back(e.v, e.u, Scalar(1));
  }
  ad::Sparse<Scalar> s(n, n);
  s.setFromTriplets(entries.begin(), entries.end());
  return s;
}

template <typename Scalar>
GraphOperators<Scalar> make_operators(const AttributedGraph& g) {
  return {normalized_adjacency<Scalar>(g), self_loop_adjacency<Scalar>(g)};
}

/// Rows = graphs, columns = nodes of the disjoint union; row i averages the
/// nodes of graph i.
template <typename Scalar>
ad::Sparse<Scalar> mean_pool_operator(std::span<const int> graph_sizes) {
  std::vector<Eigen::Triplet<Scalar>> entries;
  int offset = 0;
  for (std::size_t gi = 0; gi < graph_sizes.size(); ++gi) {
    const int n = graph_sizes[gi];
    if (n < 1) throw InvalidArgument("mean pooling over an empty graph");
    for (int v = 0; v < n; ++v)
      entries.emplace_back(static_cast<int>(gi), offset + v, Scalar(1) / Scalar(n));
    offset += n;
  }
  ad::Sparse<Scalar> s(static_cast<Eigen::Index>(graph_sizes.size()), offset);
  s.setFromTriplets(entries.begin(), entries.end());
  return s;
}

/// Arithmetic mean over node rows.
template <typename Derived>
ad::Matrix<typename Derived::Scalar> mean_pool(const Eigen::MatrixBase<Derived>& nodes) {
  if (nodes.rows() < 1) throw InvalidArgument("mean pooling over zero nodes");
  return nodes.colwise().mean();
}

/// Shapes of every parameter tensor, in the order the forwards consume them.
inline std::vector<std::pair<int, int>> parameter_shapes(const Architecture& arch) {
  std::vector<std::pair<int, int>> shapes;
  auto affine = [&](int in, int out) {
    shapes.emplace_back(in, out);
    shapes.emplace_back(1, out);
  };
  auto stack = [&](int in, int out, int layers) {
    for (int l = 0; l < layers; ++l)
      affine(l == 0 ? in : arch.hidden, l == layers - 1 ? out : arch.hidden);
  };
  switch (arch.tag) {
    case ModelTag::MLP:
    case ModelTag::GCN:
    case ModelTag::APPNP:
      stack(arch.in_dim, arch.out_dim, arch.layers);
      break;
    case ModelTag::SGC:
      affine(arch.in_dim, arch.out_dim);
      break;
    case ModelTag::GIN:
      for (int l = 0; l < arch.layers; ++l) {
        affine(l == 0 ? arch.in_dim : arch.hidden, arch.hidden);
        affine(arch.hidden, l == arch.layers - 1 ? arch.out_dim : arch.hidden);
      }
      break;
    default:
      throw InvalidArgument("not a neural model");
  }
  if (arch.readout) affine(arch.out_dim, 1);
  return shapes;
}

/// Weights ~ N(0, 1/fan_in), biases zero.
template <typename Scalar>
std::vector<ad::Matrix<Scalar>> init_parameters(const Architecture& arch, Rng& rng) {
  std::vector<ad::Matrix<Scalar>> params;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto [rows, cols] : parameter_shapes(arch))
    params.push_back(ad::Matrix<Scalar>::Zero(rows, cols));
  // shapes alternate weight, bias
  for (std::size_t i = 0; i < params.size(); i += 2) {
    const Scalar stddev = Scalar(1) / std::sqrt(static_cast<Scalar>(params[i].rows()));
    for (Eigen::Index r = 0; r < params[i].rows(); ++r)
      for (Eigen::Index c = 0; c < params[i].cols(); ++c)
        params[i](r, c) = stddev * static_cast<Scalar>(normal(rng));
  }
  return params;
}

/// Dropout on hidden activations. Inactive when `rng` is null or rate is 0.
template <typename Scalar>
struct Dropout {
  Scalar rate = 0;
  Rng* rng = nullptr;

  ad::Var apply(ad::Tape<Scalar>& t, ad::Var h) const {
    if (rng == nullptr || rate <= 0) return h;
    const Scalar keep = Scalar(1) - rate;
    // One engine draw per mask; entries come from hashing (draw, index) and
    // comparing 32-bit halves against keep.
    const std::uint64_t key = (*rng)();
    const auto threshold = static_cast<std::uint64_t>(static_cast<double>(keep) * 4294967296.0);
    const auto& v = t.value(h);
    ad::Matrix<Scalar> m(v.rows(), v.cols());
    const Scalar kept = Scalar(1) / keep;
    Scalar* out = m.data();
    const auto size = static_cast<std::uint64_t>(m.size());
    for (std::uint64_t i = 0; i < size; ++i) {
      const std::uint64_t bits = mix64(key + 0x9e3779b97f4a7c15ULL * (i / 2 + 1));
      const std::uint64_t half = (i & 1) ? bits >> 32 : bits & 0xffffffffULL;
      out[i] = kept * static_cast<Scalar>(half < threshold);
    }
    return ad::mask(t, h, std::move(m));
  }
};

namespace detail {

template <typename Scalar>
ad::Var affine(ad::Tape<Scalar>& t, ad::Var h, std::span<const ad::Var> p, std::size_t& next) {
  const ad::Var w = p[next++];
  const ad::Var b = p[next++];
  return ad::add_bias(t, ad::matmul(t, h, w), b);
}

template <typename Scalar>
ad::Var mlp_stack(ad::Tape<Scalar>& t, const Architecture& arch, std::span<const ad::Var> p,
                  std::size_t& next, ad::Var x, const Dropout<Scalar>& dropout) {
  ad::Var h = x;
  for (int l = 0; l < arch.layers; ++l) {
    h = affine(t, h, p, next);
    if (l + 1 < arch.layers) h = dropout.apply(t, ad::relu(t, h));
  }
  return h;
}

}  // namespace detail

/// L affine layers, ReLU between them; never reads the graph.
template <typename Scalar>
ad::Var forward_mlp(ad::Tape<Scalar>& t, const Architecture& arch, std::span<const ad::Var> p,
                    ad::Var x, const Dropout<Scalar>& dropout = {}) {
  std::size_t next = 0;
  return detail::mlp_stack(t, arch, p, next, x, dropout);
}

/// H <- ReLU(A_hat H W + b) per layer, last layer without ReLU.
template <typename Scalar>
ad::Var forward_gcn(ad::Tape<Scalar>& t, const Architecture& arch, std::span<const ad::Var> p,
                    const GraphOperators<Scalar>& ops, ad::Var x,
                    const Dropout<Scalar>& dropout = {}) {
  std::size_t next = 0;
  ad::Var h = x;
  for (int l = 0; l < arch.layers; ++l) {
    const ad::Var w = p[next++];
    const ad::Var b = p[next++];
    h = ad::add_bias(t, ad::spmm(t, ops.normalized, ad::matmul(t, h, w)), b);
    if (l + 1 < arch.layers) h = dropout.apply(t, ad::relu(t, h));
  }
  return h;
}

/// A_hat^K X without a tape; SGC's propagation has no parameters, so
/// training can apply it once and run forward_sgc with zero iterations.
template <typename Scalar>
ad::Matrix<Scalar> sgc_propagate(const GraphOperators<Scalar>& ops, ad::Matrix<Scalar> x,
                                 int iterations) {
  for (int k = 0; k < iterations; ++k) x = ops.normalized * x;
  return x;
}

/// A_hat^K X W + b.
template <typename Scalar>
ad::Var forward_sgc(ad::Tape<Scalar>& t, const Architecture& arch, std::span<const ad::Var> p,
                    const GraphOperators<Scalar>& ops, ad::Var x) {
  ad::Var h = x;
  for (int k = 0; k < arch.iterations; ++k) h = ad::spmm(t, ops.normalized, h);
  std::size_t next = 0;
  return detail::affine(t, h, p, next);
}

/// H0 = MLP(X); H <- (1 - alpha) A_hat H + alpha H0, `iterations` times.
template <typename Scalar>
ad::Var forward_appnp(ad::Tape<Scalar>& t, const Architecture& arch,
                      std::span<const ad::Var> p, const GraphOperators<Scalar>& ops, ad::Var x,
                      const Dropout<Scalar>& dropout = {}) {
  std::size_t next = 0;
  const ad::Var h0 = detail::mlp_stack(t, arch, p, next, x, dropout);
  const auto a = static_cast<Scalar>(arch.alpha);
  ad::Var h = h0;
  for (int k = 0; k < arch.iterations; ++k)
    h = ad::spmm_mix(t, ops.normalized, h, Scalar(1) - a, h0, a);
  return h;
}

/// H <- MLP_l((A + I) H) with MLP_l = affine-ReLU-affine; ReLU between layers.
template <typename Scalar>
ad::Var forward_gin(ad::Tape<Scalar>& t, const Architecture& arch, std::span<const ad::Var> p,
                    const GraphOperators<Scalar>& ops, ad::Var x,
                    const Dropout<Scalar>& dropout = {}) {
  std::size_t next = 0;
  ad::Var h = x;
  for (int l = 0; l < arch.layers; ++l) {
    h = ad::spmm(t, ops.summed, h);
    h = dropout.apply(t, ad::relu(t, detail::affine(t, h, p, next)));
    h = detail::affine(t, h, p, next);
    if (l + 1 < arch.layers) h = dropout.apply(t, ad::relu(t, h));
  }
  return h;
}

/// Node-level output of any neural model (n x out_dim).
template <typename Scalar>
ad::Var forward_nodes(ad::Tape<Scalar>& t, const Architecture& arch,
                      std::span<const ad::Var> p, const GraphOperators<Scalar>& ops, ad::Var x,
                      const Dropout<Scalar>& dropout = {}) {
  switch (arch.tag) {
    case ModelTag::MLP: return forward_mlp(t, arch, p, x, dropout);
    case ModelTag::GCN: return forward_gcn(t, arch, p, ops, x, dropout);
    case ModelTag::SGC: return forward_sgc(t, arch, p, ops, x);
    case ModelTag::APPNP: return forward_appnp(t, arch, p, ops, x, dropout);
    case ModelTag::GIN: return forward_gin(t, arch, p, ops, x, dropout);
    default: throw InvalidArgument("not a neural model");
  }
}

/// Mean-pooled graph embeddings through the linear readout (graphs x 1).
template <typename Scalar>
ad::Var forward_graphs(ad::Tape<Scalar>& t, const Architecture& arch,
                       std::span<const ad::Var> p, const GraphOperators<Scalar>& ops,
                       const ad::Sparse<Scalar>& pool, ad::Var x,
                       const Dropout<Scalar>& dropout = {}) {
  if (!arch.readout) throw InvalidArgument("architecture has no readout");
  const std::size_t body = p.size() - 2;
  const ad::Var nodes = forward_nodes(t, arch, p.first(body), ops, x, dropout);
  const ad::Var pooled = ad::spmm(t, pool, nodes);
  return ad::add_bias(t, ad::matmul(t, pooled, p[body]), p[body + 1]);
}

}  // namespace graphpop
