#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ebae/adjust.hpp"
#include "ebae/config.hpp"
#include "ebae/data.hpp"
#include "ebae/metrics.hpp"
#include "ebae/ranking.hpp"
#include "ebae/stats.hpp"
#include "ebae/validation.hpp"

namespace ebae {

struct FilterVerdict {
  std::string label;
  bool kept = false;
  /// Empty for kept variants.
  std::string reason;
};

/// Keeps variants with SA > SA5 and Delta > delta_threshold.
std::vector<FilterVerdict> filter_actual_predictors(std::span<const EvalSummary> summaries,
                                                    double delta_threshold = 0.5);

/// Box-Cox over the pooled absolute errors of all tables, then Scott-Knott on
/// the transformed errors of each table.
ScottKnottResult cluster_tables(std::span<const PredictionTable> tables, double alpha);

struct BestCluster {
  std::vector<std::string> members;
  std::optional<ScottKnottResult> clustering;
};

/// Smallest-mean Scott-Knott cluster; a single survivor is returned as is.
BestCluster select_best_cluster(std::span<const PredictionTable> survivors, double alpha);

/// Borda over MAE, LSD, MBRE and MIBRE.
RankingOutcome rank_summaries(std::span<const EvalSummary> summaries);

/// Candidates in Borda order; equal scores are ordered by MAE, then label.
std::vector<std::string> borda_order(const RankingOutcome& outcome,
                                     std::span<const EvalSummary> summaries);

struct EnsembleSpec {
  std::string id;
  std::vector<std::string> members;
};

/// Top2..TopM over a ranked list; empty when M < 2.
std::vector<EnsembleSpec> build_ensembles(std::span<const std::string> ranked);

double predict_ensemble(std::span<const double> member_predictions);
/// Mean of member predictions for the fold's target.
double predict_ensemble(const EnsembleSpec& spec, FoldEstimator& fold);

/// Row-wise mean of the member tables (looked up by label).
PredictionTable ensemble_table(const EnsembleSpec& spec, std::span<const PredictionTable> tables);

struct AverageRanks {
  std::optional<double> ensembles;
  std::optional<double> singles;
};

struct BestK {
  Method method = Method::EBA;
  int k = 1;
  double mean_transformed_ae = 0.0;
};

struct NormalityRow {
  std::string label;
  std::optional<KsResult> raw;
  std::optional<KsResult> transformed;
};

struct PipelineReport {
  std::string dataset;
  std::size_t n = 0;
  std::size_t m = 0;
  ExperimentConfig config;
  BaselineStats baseline;

  std::vector<PredictionTable> tables;
  std::vector<EvalSummary> summaries;
  std::vector<FilterVerdict> verdicts;
  std::vector<std::string> survivors;

  std::optional<ScottKnottResult> clustering;
  std::vector<std::string> best;
  std::optional<RankingOutcome> borda;
  std::vector<std::string> ranked_best;

  std::vector<EnsembleSpec> ensembles;
  std::vector<PredictionTable> ensemble_tables;
  std::vector<EvalSummary> ensemble_summaries;

  std::vector<EvalSummary> joint_summaries;
  std::optional<ScottKnottResult> joint_clustering;
  std::optional<RankingOutcome> joint;
  std::vector<std::string> joint_order;
  AverageRanks average_ranks;

  std::optional<TransformSpec> all_transform;
  std::vector<double> transformed_means;
  std::vector<BestK> best_k;
  std::optional<ScottKnottResult> types;
  std::vector<NormalityRow> normality;

  std::vector<std::string> notes;

  const EvalSummary* summary(const std::string& label) const;
};

PipelineReport run_pipeline(const Dataset& data, const ExperimentConfig& config);

}  // namespace ebae
