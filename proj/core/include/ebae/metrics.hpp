#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ebae {

struct PointwiseErrors {
  double ae = 0.0;
  double mre = 0.0;
  double log_residual = 0.0;  ///< ln(actual) - ln(max(predicted, floor))
};

/// Throws std::invalid_argument unless actual > 0 and floor > 0.
PointwiseErrors pointwise_errors(double actual, double predicted, double floor = 1e-12);

/// Prediction floor used for log residuals and balanced errors:
/// 1e-6 times the median effort.
double log_floor(std::span<const double> efforts);

struct PredictionRow {
  std::string id;
  double actual = 0.0;
  double predicted = 0.0;
  double ae = 0.0;
  double mre = 0.0;
  double log_residual = 0.0;
};

struct PredictionTable {
  std::string label;
  std::vector<PredictionRow> rows;
  std::size_t fallback_count = 0;
  double floor = 1e-12;

  void add(std::string id, double actual, double predicted);
  std::size_t size() const { return rows.size(); }
  std::vector<double> absolute_errors() const;
  std::vector<double> predictions() const;
};

double mae(const PredictionTable& t);
double mmre(const PredictionTable& t);
/// Percentage of rows with MRE <= 0.25.
double pred25(const PredictionTable& t);

/// Sample variance of the log residuals.
double log_residual_variance(std::span<const double> lambdas);
/// sqrt(sum (l_i + s^2/2)^2 / (n-1)); throws std::invalid_argument for n < 2.
double lsd(std::span<const double> lambdas);
double lsd(const PredictionTable& t);

struct BalancedErrors {
  double mbre = 0.0;
  double mibre = 0.0;
};
BalancedErrors mbre_mibre(const PredictionTable& t);

struct BaselineStats {
  /// Exact expectation of the random-guess MAE.
  double mae_p0 = 0.0;
  /// Sample standard deviation of Monte-Carlo run MAEs.
  double sp0 = 0.0;
  /// 1 - (5% quantile of run MAEs) / mae_p0, as a fraction.
  double sa5 = 0.0;
  double mean_run_mae = 0.0;
  int runs = 0;
  std::uint64_t seed = 0;

  bool defined() const { return mae_p0 > 0.0; }
};

/// Random guessing: each target t is predicted by the effort of a uniformly
/// drawn other project r != t.
double exact_random_guess_mae(std::span<const double> efforts);
BaselineStats baseline(std::span<const double> efforts, int runs, std::uint64_t seed);

/// Linear-interpolation quantile of an unsorted sample.
double quantile(std::vector<double> values, double p);

/// 1 - MAE / MAE_p0 as a fraction; throws DegenerateInput for an undefined baseline.
double standardized_accuracy(double mae, const BaselineStats& b);
/// (MAE_p0 - MAE) / SP0; throws DegenerateInput when SP0 = 0.
double effect_size(double mae, const BaselineStats& b);

struct EvalSummary {
  std::string label;
  double mae = 0.0;
  double mmre = 0.0;
  double pred25 = 0.0;
  double lsd = 0.0;
  double s2 = 0.0;
  double mbre = 0.0;
  double mibre = 0.0;
  double sa = 0.0;
  double delta = 0.0;
  std::size_t fallback_count = 0;
  BaselineStats baseline;
};

EvalSummary summarize(const PredictionTable& t, const BaselineStats& b);

}  // namespace ebae
