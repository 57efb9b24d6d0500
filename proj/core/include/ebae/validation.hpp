#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ebae/adjust.hpp"
#include "ebae/analogy.hpp"
#include "ebae/config.hpp"
#include "ebae/data.hpp"
#include "ebae/learners.hpp"
#include "ebae/metrics.hpp"

namespace ebae {

struct FoldPrediction {
  double value = 0.0;
  bool fallback = false;
};

/// One leave-one-out fold: training set without `test_row`, its case base,
/// and learners fitted on demand. Not copyable; the case base refers to the
/// training set held here.
class FoldEstimator {
 public:
  FoldEstimator(const Dataset& data, std::size_t test_row, const ExperimentConfig& config);
  FoldEstimator(const FoldEstimator&) = delete;
  FoldEstimator& operator=(const FoldEstimator&) = delete;

  const Dataset& train() const { return train_; }
  const Project& target() const { return target_; }
  std::size_t fold() const { return fold_; }
  /// Nearest training analogies of the target, up to k_max.
  const Neighborhood& neighborhood() const { return neighborhood_; }

  /// Prediction for one variant; falls back to EBA with the same k when the
  /// method is inapplicable or its learner cannot be fitted.
  FoldPrediction predict(VariantId variant);

  std::uint64_t seed_for(Method method, int k) const;

 private:
  const std::vector<Neighborhood>& self_neighborhoods();
  const std::vector<DiffPair>& diff_pairs();
  const std::optional<ModelTree>& tree();
  const std::optional<FeedForwardNet>& network();
  const std::optional<GaWeights>& ga(int k);
  const RtmModel& rtm();

  const ExperimentConfig* config_;
  std::size_t fold_;
  Project target_;
  Dataset train_;
  CaseBase base_;
  Neighborhood neighborhood_;

  std::optional<std::vector<Neighborhood>> self_;
  std::optional<std::vector<DiffPair>> pairs_;
  std::optional<std::optional<ModelTree>> tree_;
  std::optional<std::optional<FeedForwardNet>> net_;
  std::map<int, std::optional<GaWeights>> ga_;
  std::optional<RtmModel> rtm_;
};

/// Runs `task(i)` for i in [0, n) on up to `threads` workers. Exceptions are
/// rethrown for the smallest failing index.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& task);

/// Throws std::invalid_argument unless n >= k + 2 for every variant.
PredictionTable loocv(const Dataset& data, VariantId variant, const ExperimentConfig& config);
std::vector<PredictionTable> loocv_all(const Dataset& data, std::span<const VariantId> variants,
                                       const ExperimentConfig& config);

/// LOOCV around an arbitrary predictor (train, target, fold index) -> estimate.
using Predictor = std::function<double(const Dataset&, const Project&, std::size_t)>;
PredictionTable loocv_with(const Dataset& data, const std::string& label,
                           const Predictor& predictor, int threads = 1);

/// Largest k usable with n projects under LOOCV: min(k_max, n - 2).
/// Throws std::invalid_argument when n < 3.
int usable_k_max(std::size_t n, int k_max);

BaselineStats dataset_baseline(const Dataset& data, const ExperimentConfig& config);

EvalSummary evaluate_variant(const Dataset& data, VariantId variant,
                             const ExperimentConfig& config);

}  // namespace ebae
