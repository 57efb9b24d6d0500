#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ebae {

struct TransformSpec {
  double lambda = 1.0;
  double shift = 0.0;
};

struct BoxCoxResult {
  std::vector<double> values;
  TransformSpec spec;
};

/// (x^l - 1)/l, or ln x when l == 0. Requires x > 0.
double box_cox_value(double x, double lambda);
std::vector<double> apply_box_cox(std::span<const double> values, const TransformSpec& spec);

/// Profile log-likelihood of lambda for strictly positive data.
double box_cox_log_likelihood(std::span<const double> positive, double lambda);

/// Chooses the shift (1e-3 * max when any value <= 0) and the lambda on the
/// grid -2, -1.99, ..., 2 that maximizes the log-likelihood.
TransformSpec fit_box_cox(std::span<const double> values);
BoxCoxResult box_cox(std::span<const double> values);

struct KsResult {
  double statistic = 0.0;
  double critical = 0.0;
  bool reject = false;
};

/// Lilliefors critical value; alpha must be one of 0.20, 0.15, 0.10, 0.05, 0.01.
double lilliefors_critical(std::size_t n, double alpha);

/// KS statistic against a normal with the sample mean and standard deviation.
/// Throws std::invalid_argument for n < 5 and DegenerateInput for a constant sample.
KsResult ks_normality(std::span<const double> values, double alpha);

/// Upper alpha quantile of the chi-squared distribution.
double chi_squared_critical(double df, double alpha);

struct Group {
  std::string label;
  std::vector<double> values;
};

struct ScottKnottCluster {
  std::vector<std::string> members;
  std::vector<double> means;
  double mean = 0.0;
};

struct ScottKnottResult {
  /// Best (smallest mean) cluster first; members ordered by mean.
  std::vector<ScottKnottCluster> clusters;
  double alpha = 0.05;
  TransformSpec transform;
  /// Pooled error variance and its degrees of freedom.
  double error_variance = 0.0;
  double error_df = 0.0;

  /// Index of the cluster holding `label`; throws std::out_of_range.
  std::size_t cluster_of(const std::string& label) const;
  std::vector<std::string> ordered_labels() const;
};

struct SplitTest {
  std::size_t left_size = 0;  ///< number of means in the first part
  double b0 = 0.0;
  double lambda = 0.0;
  double critical = 0.0;
  bool significant = false;
};

/// Best contiguous split of sorted means and its significance.
/// `mean_error_variance` is the error variance of one group mean (MSE / r).
SplitTest scott_knott_split(std::span<const double> sorted_means, double mean_error_variance,
                            double error_df, double alpha);

/// Recursive Scott-Knott on sorted means; returns the size of each cluster.
std::vector<std::size_t> scott_knott_partition(std::span<const double> sorted_means,
                                               double mean_error_variance, double error_df,
                                               double alpha);

/// One-way Scott-Knott. Needs >= 2 groups, each with >= 2 observations.
ScottKnottResult scott_knott(std::span<const Group> groups, double alpha);

struct Cell {
  std::string treatment;
  int level = 0;
  std::vector<double> values;
};

/// Scott-Knott over treatment means of a treatment x level layout, using the
/// within-cell residual mean square.
ScottKnottResult scott_knott_two_way(std::span<const Cell> cells, double alpha);

}  // namespace ebae
