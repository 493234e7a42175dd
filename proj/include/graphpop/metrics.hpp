#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "graphpop/errors.hpp"

namespace graphpop {

enum class MetricKind { AUC_OVR, AUC_LP, SCALED_MSE };

inline constexpr std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::AUC_OVR: return "AUC_OVR";
    case MetricKind::AUC_LP: return "AUC_LP";
    case MetricKind::SCALED_MSE: return "SCALED_MSE";
  }
  return "?";
}

MetricKind metric_kind_from_string(std::string_view name);

inline constexpr bool higher_is_better(MetricKind kind) {
  return kind != MetricKind::SCALED_MSE;
}

struct MetricValue {
  MetricKind kind = MetricKind::AUC_OVR;
  double value = 0.0;

  friend bool operator==(const MetricValue&, const MetricValue&) = default;
};

/// True if `a` is strictly better than `b` under `kind`'s direction.
inline constexpr bool better(MetricKind kind, double a, double b) {
  return higher_is_better(kind) ? a > b : a < b;
}

namespace detail {

template <typename Scalar>
Scalar mean(std::span<const Scalar> values) {
  Scalar sum = 0;
  for (Scalar v : values) sum += v;
  return sum / static_cast<Scalar>(values.size());
}

}  // namespace detail

/// Mann-Whitney ROC-AUC with midranks: the probability that a random positive
/// outscores a random negative, ties counting one half.
template <typename Scalar>
Scalar roc_auc(std::span<const Scalar> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw InvalidArgument("scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // twice the rank sum of positives keeps midranks integral
  long double rank_sum2 = 0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const long double midrank2 = static_cast<long double>(i + 1 + j);  // 2 * (i+1 + j)/2
    for (std::size_t t = i; t < j; ++t)
      if (labels[order[t]] != 0) {
        rank_sum2 += midrank2;
        ++positives;
      }
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0)
    throw DegenerateLabels("ROC-AUC needs both positive and negative examples");
  const long double p = static_cast<long double>(positives);
  const long double u2 = rank_sum2 - p * (p + 1);
  return static_cast<Scalar>(u2 / (2.0L * p * static_cast<long double>(negatives)));
}

template <typename Scalar>
Scalar roc_auc(const std::vector<Scalar>& scores, const std::vector<int>& labels) {
  return roc_auc(std::span<const Scalar>(scores), std::span<const int>(labels));
}

/// Macro one-vs-rest AUC over the columns of `class_scores` (rows are
/// examples). Classes without both positives and negatives are skipped.
template <typename Derived>
typename Derived::Scalar roc_auc_ovr(const Eigen::MatrixBase<Derived>& class_scores,
                                     std::span<const int> labels) {
  using Scalar = typename Derived::Scalar;
  const auto n = class_scores.rows();
  const auto k = class_scores.cols();
  if (static_cast<std::size_t>(n) != labels.size())
    throw InvalidArgument("score rows and labels differ in length");
  if (k < 2) throw InvalidArgument("one-vs-rest AUC needs at least two classes");
  std::vector<Scalar> column(n);
  std::vector<int> indicator(n);
  Scalar total = 0;
  int used = 0;
  for (Eigen::Index c = 0; c < k; ++c) {
    std::size_t pos = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      column[i] = class_scores(i, c);
      indicator[i] = labels[i] == c;
      pos += indicator[i];
    }
    if (pos == 0 || pos == static_cast<std::size_t>(n)) continue;
    total += roc_auc(std::span<const Scalar>(column), std::span<const int>(indicator));
    ++used;
  }
  if (used == 0) throw DegenerateLabels("no class has both positives and negatives");
  return total / used;
}

/// sum (y - yhat)^2 / sum (y - ybar)^2 with ybar the mean of `targets`.
template <typename Scalar>
Scalar scaled_mse(std::span<const Scalar> preds, std::span<const Scalar> targets) {
  if (preds.size() != targets.size())
    throw InvalidArgument("predictions and targets differ in length");
  if (targets.size() < 2) throw DegenerateTargets("scaled MSE needs at least two targets");
  const Scalar ybar = detail::mean(targets);
  Scalar num = 0, den = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    num += (targets[i] - preds[i]) * (targets[i] - preds[i]);
    den += (targets[i] - ybar) * (targets[i] - ybar);
  }
  if (den == 0) throw DegenerateTargets("all targets are equal");
  return num / den;
}

template <typename Scalar>
Scalar scaled_mse(const std::vector<Scalar>& preds, const std::vector<Scalar>& targets) {
  return scaled_mse(std::span<const Scalar>(preds), std::span<const Scalar>(targets));
}

/// The naive predictor: every prediction equals the evaluated targets' mean.
template <typename Scalar>
std::vector<Scalar> mean_predictions(std::span<const Scalar> targets) {
  return std::vector<Scalar>(targets.size(), detail::mean(targets));
}

}  // namespace graphpop
