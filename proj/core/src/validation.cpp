#include "ebae/validation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "ebae/error.hpp"
#include "ebae/seed.hpp"

namespace ebae {

FoldEstimator::FoldEstimator(const Dataset& data, std::size_t test_row,
                             const ExperimentConfig& config)
    : config_(&config),
      fold_(test_row),
      target_(data.project(test_row)),
      train_(data.without(test_row)),
      base_(train_),
      neighborhood_(base_.retrieve(
          target_, std::min(static_cast<std::size_t>(std::max(config.k_max, 1)), train_.size()))) {}

std::uint64_t FoldEstimator::seed_for(Method method, int k) const {
  return derive_seed(config_->seed, {static_cast<std::uint64_t>(fold_),
                                     tag(method_name(method)), static_cast<std::uint64_t>(k)});
}

const std::vector<Neighborhood>& FoldEstimator::self_neighborhoods() {
  if (!self_) {
    const auto k = std::min(static_cast<std::size_t>(std::max(config_->k_max, 1)),
                            train_.size() - 1);
    self_ = base_.self_neighborhoods(k);
  }
  return *self_;
}

const std::vector<DiffPair>& FoldEstimator::diff_pairs() {
  if (!pairs_) pairs_ = build_diff_pairs(train_, self_neighborhoods());
  return *pairs_;
}

const std::optional<ModelTree>& FoldEstimator::tree() {
  if (!tree_) {
    try {
      tree_.emplace(fit_model_tree(diff_pairs(), tree_config(config_->learners)));
    } catch (const FitFailure&) {
      tree_.emplace(std::nullopt);
    }
  }
  return *tree_;
}

const std::optional<FeedForwardNet>& FoldEstimator::network() {
  if (!net_) {
    try {
      net_.emplace(fit_network(diff_pairs(), network_config(config_->learners),
                               seed_for(Method::NN, 0)));
    } catch (const FitFailure&) {
      net_.emplace(std::nullopt);
    }
  }
  return *net_;
}

const std::optional<GaWeights>& FoldEstimator::ga(int k) {
  auto it = ga_.find(k);
  if (it == ga_.end()) {
    std::optional<GaWeights> w;
    const auto kk = static_cast<std::size_t>(k);
    if (train_.size() >= kk + 2 && self_neighborhoods().front().k() >= kk) {
      const GaObjective objective(train_, self_neighborhoods(), kk);
      w = fit_ga_weights(objective, ga_config(config_->learners), seed_for(Method::GA, k));
    }
    it = ga_.emplace(k, std::move(w)).first;
  }
  return it->second;
}

const RtmModel& FoldEstimator::rtm() {
  if (!rtm_) rtm_ = fit_rtm(train_, self_neighborhoods(), config_->learners.rtm_mean);
  return *rtm_;
}

FoldPrediction FoldEstimator::predict(VariantId v) {
  if (v.k < 1 || static_cast<std::size_t>(v.k) > neighborhood_.k()) {
    throw std::invalid_argument("dataset too small for " + v.name());
  }
  const auto nbh = neighborhood_.prefix(static_cast<std::size_t>(v.k));
  std::optional<double> estimate;
  switch (v.method) {
    case Method::EBA: estimate = adjust_eba(target_, nbh, train_); break;
    case Method::LSE: estimate = adjust_lse(target_, nbh, train_); break;
    case Method::MLFE: estimate = adjust_mlfe(target_, nbh, train_); break;
    case Method::RTM: estimate = adjust_rtm(target_, nbh, train_, rtm()); break;
    case Method::AQUA: estimate = adjust_aqua(target_, nbh, train_); break;
    case Method::MT:
      if (const auto& t = tree()) estimate = adjust_mt(target_, nbh, train_, *t);
      break;
    case Method::GA:
      if (const auto& w = ga(v.k)) estimate = adjust_ga(target_, nbh, train_, *w);
      break;
    case Method::NN:
      if (const auto& n = network()) estimate = adjust_nn(target_, nbh, train_, *n);
      break;
  }
  if (estimate && std::isfinite(*estimate)) return {*estimate, false};
  return {*adjust_eba(target_, nbh, train_), true};
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(n);
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
  std::atomic<std::size_t> next{0};
  const auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    run();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

void require_size(const Dataset& data, std::span<const VariantId> variants) {
  for (const auto& v : variants) {
    if (v.k < 1 || data.size() < static_cast<std::size_t>(v.k) + 2) {
      throw std::invalid_argument("dataset too small for " + v.name() + " (need n >= k+2)");
    }
  }
}

}  // namespace

std::vector<PredictionTable> loocv_all(const Dataset& data, std::span<const VariantId> variants,
                                       const ExperimentConfig& config) {
  require_size(data, variants);
  ExperimentConfig local = config;
  for (const auto& v : variants) local.k_max = std::max(local.k_max, v.k);

  const auto n = data.size();
  std::vector<std::vector<FoldPrediction>> folds(n);
  parallel_for(n, config.threads, [&](std::size_t t) {
    FoldEstimator fold(data, t, local);
    auto& out = folds[t];
    out.reserve(variants.size());
    for (const auto& v : variants) out.push_back(fold.predict(v));
  });

  const double floor = log_floor(data.efforts());
  std::vector<PredictionTable> tables(variants.size());
  for (std::size_t i = 0; i < variants.size(); ++i) {
    auto& table = tables[i];
    table.label = variants[i].name();
    table.floor = floor;
    for (std::size_t t = 0; t < n; ++t) {
      const auto& p = folds[t][i];
      table.add(data.project(t).id, data.project(t).effort, p.value);
      if (p.fallback) ++table.fallback_count;
    }
  }
  return tables;
}

PredictionTable loocv(const Dataset& data, VariantId variant, const ExperimentConfig& config) {
  const VariantId one[] = {variant};
  return std::move(loocv_all(data, one, config).front());
}

PredictionTable loocv_with(const Dataset& data, const std::string& label,
                           const Predictor& predictor, int threads) {
  const auto n = data.size();
  std::vector<double> predicted(n);
  parallel_for(n, threads, [&](std::size_t t) {
    const Dataset train = data.without(t);
    predicted[t] = predictor(train, data.project(t), t);
  });
  PredictionTable table;
  table.label = label;
  table.floor = log_floor(data.efforts());
  for (std::size_t t = 0; t < n; ++t) {
    table.add(data.project(t).id, data.project(t).effort, predicted[t]);
  }
  return table;
}

int usable_k_max(std::size_t n, int k_max) {
  if (n < 3) throw std::invalid_argument("dataset too small for LOOCV");
  return std::min(k_max, static_cast<int>(n) - 2);
}

BaselineStats dataset_baseline(const Dataset& data, const ExperimentConfig& config) {
  return baseline(data.efforts(), config.baseline_runs,
                  derive_seed(config.seed, {tag("baseline")}));
}

EvalSummary evaluate_variant(const Dataset& data, VariantId variant,
                             const ExperimentConfig& config) {
  return summarize(loocv(data, variant, config), dataset_baseline(data, config));
}

}  // namespace ebae
