#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graphpop/generators.hpp"
#include "graphpop/hyperconfig.hpp"
#include "graphpop/records.hpp"

namespace graphpop {

/// Upper edges of the first nbins - 1 quantile bins: the type-1 empirical
/// quantiles at j / nbins.
std::vector<double> quantile_edges(std::span<const double> values, int nbins);

/// Bin of each value under right-closed edges: (e[b-1], e[b]].
std::vector<int> assign_bins(std::span<const double> edges, std::span<const double> values);

/// Quantile bin per value in [0, nbins). Equal values share a bin.
/// Throws InvalidArgument if nbins < 2, TooFewValues if |values| < nbins.
std::vector<int> quantile_bins(std::span<const double> values, int nbins);

/// One-way ANOVA F over the nonempty groups. Returns +infinity when the
/// within-group spread is zero but the between-group spread is not, and 0
/// when there is no between-group spread. Throws DegenerateGroups with
/// fewer than two nonempty groups or no residual degrees of freedom.
double f_statistic(const std::vector<std::vector<double>>& groups);

/// Per-location generator parameters and the models' metrics there.
struct WorldTable {
  std::vector<std::string> params;
  Eigen::MatrixXd values;   ///< locations x params
  std::vector<ModelTag> models;
  Eigen::MatrixXd metrics;  ///< locations x models, NaN where missing
  Eigen::VectorXd z;        ///< per-location mean over finite metrics

  Eigen::Index rows() const noexcept { return values.rows(); }
};

/// Builds the table from ok records; locations without any finite metric
/// are dropped. Throws NoRecords when nothing is left.
WorldTable world_table_from_records(std::span<const ResultRecord> records);

/// Table with z given directly (one model column holding z).
WorldTable make_world_table(std::vector<std::string> params, Eigen::MatrixXd values,
                            Eigen::VectorXd z);

struct ParameterChoice {
  std::string name;
  std::vector<std::optional<double>> bin_scores;  ///< average F per bin of this parameter
  std::optional<int> winning_bin;
  double value = 0.0;
  bool fallback = false;  ///< no valid F anywhere; value is the global median
};

struct AffectiveResult {
  GeneratorConfig config;
  std::vector<ParameterChoice> choices;
};

/// Marginal search: for each parameter, the quantile bin whose rows show
/// the largest average F of z grouped by every other parameter's bins.
/// Infinite and degenerate F values are left out of the averages. The
/// emitted value is the median of the parameter inside its winning bin.
AffectiveResult affective_config(const WorldTable& table, int nbins = 4);

}  // namespace graphpop
