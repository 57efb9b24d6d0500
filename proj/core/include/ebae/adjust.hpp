#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ebae/analogy.hpp"
#include "ebae/config.hpp"
#include "ebae/data.hpp"
#include "ebae/learners.hpp"

namespace ebae {

enum class Method { EBA, LSE, MLFE, RTM, AQUA, MT, GA, NN };

inline constexpr std::array<Method, 8> kMethods = {Method::EBA,  Method::LSE, Method::MLFE,
                                                   Method::RTM,  Method::AQUA, Method::MT,
                                                   Method::GA,   Method::NN};

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view name);

struct VariantId {
  Method method = Method::EBA;
  int k = 1;

  /// e.g. "LSE3"
  std::string name() const;
  friend auto operator<=>(const VariantId&, const VariantId&) = default;
};

std::optional<VariantId> parse_variant(std::string_view name);

/// Methods in table order, then k ascending: 8 * k_max entries.
std::vector<VariantId> enumerate_variants(int k_max = 5);

// Adjustment rules. An empty result means the method is inapplicable for
// this target (zero or missing sizes); callers fall back to EBA.

std::optional<double> adjust_eba(const Project& target, const Neighborhood& nbh,
                                 const Dataset& train);
std::optional<double> adjust_lse(const Project& target, const Neighborhood& nbh,
                                 const Dataset& train);
std::optional<double> adjust_mlfe(const Project& target, const Neighborhood& nbh,
                                  const Dataset& train);
std::optional<double> adjust_aqua(const Project& target, const Neighborhood& nbh,
                                  const Dataset& train);

struct RtmParams {
  double h = 0.0;
  double c = 0.0;
  std::vector<double> productivities;
};

/// size_t * mean_i [pr_i + (h - pr_i)(1 - c)]
double rtm_estimate(double target_size, const RtmParams& params);

struct RtmModel {
  /// Productivity correlation over the training fold, clamped to [0,1].
  double correlation = 0.0;
  /// Set when h is the fold-wide mean productivity; otherwise h is the mean
  /// over the retrieved analogies.
  std::optional<double> mean_productivity;
};

/// Pearson correlation between each training project's productivity and the
/// productivity of its nearest within-training analogy; 0 when undefined.
double estimate_rtm_correlation(const Dataset& train);
double estimate_rtm_correlation(const Dataset& train,
                                std::span<const Neighborhood> self_neighborhoods);

RtmModel fit_rtm(const Dataset& train, RtmMean mean);
RtmModel fit_rtm(const Dataset& train, std::span<const Neighborhood> self_neighborhoods,
                 RtmMean mean);

std::optional<double> adjust_rtm(const Project& target, const Neighborhood& nbh,
                                 const Dataset& train, const RtmModel& model);

double adjust_mt(const Project& target, const Neighborhood& nbh, const Dataset& train,
                 const ModelTree& tree);
double adjust_ga(const Project& target, const Neighborhood& nbh, const Dataset& train,
                 const GaWeights& weights);
double adjust_nn(const Project& target, const Neighborhood& nbh, const Dataset& train,
                 const FeedForwardNet& net);

}  // namespace ebae
