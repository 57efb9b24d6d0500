#include "ebae/adjust.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace ebae {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::EBA: return "EBA";
    case Method::LSE: return "LSE";
    case Method::MLFE: return "MLFE";
    case Method::RTM: return "RTM";
    case Method::AQUA: return "AQUA";
    case Method::MT: return "MT";
    case Method::GA: return "GA";
    case Method::NN: return "NN";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  for (auto m : kMethods) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

std::string VariantId::name() const {
  return std::string(method_name(method)) + std::to_string(k);
}

std::optional<VariantId> parse_variant(std::string_view name) {
  const auto digits = name.find_first_of("0123456789");
  if (digits == std::string_view::npos || digits == 0) return std::nullopt;
  const auto method = parse_method(name.substr(0, digits));
  if (!method) return std::nullopt;
  int k = 0;
  const auto rest = name.substr(digits);
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), k);
  if (ec != std::errc{} || ptr != rest.data() + rest.size() || k < 1) return std::nullopt;
  return VariantId{*method, k};
}

std::vector<VariantId> enumerate_variants(int k_max) {
  if (k_max < 1) throw std::invalid_argument("enumerate_variants: k_max must be >= 1");
  std::vector<VariantId> out;
  for (auto m : kMethods) {
    for (int k = 1; k <= k_max; ++k) out.push_back({m, k});
  }
  return out;
}

namespace {

void require_analogies(const Neighborhood& nbh) {
  if (nbh.analogies.empty()) throw std::invalid_argument("adjust: empty neighborhood");
}

double mean_corrected(const Project& target, const Neighborhood& nbh, const Dataset& train,
                      auto&& correction) {
  require_analogies(nbh);
  double sum = 0.0;
  for (const auto& a : nbh.analogies) {
    const auto& other = train.project(a.index);
    const auto diff = feature_difference(target, other, train.features());
    sum += other.effort + correction(diff);
  }
  return sum / static_cast<double>(nbh.k());
}

}  // namespace

std::optional<double> adjust_eba(const Project&, const Neighborhood& nbh, const Dataset& train) {
  require_analogies(nbh);
  double sum = 0.0;
  for (const auto& a : nbh.analogies) sum += train.project(a.index).effort;
  return sum / static_cast<double>(nbh.k());
}

std::optional<double> adjust_lse(const Project& target, const Neighborhood& nbh,
                                 const Dataset& train) {
  require_analogies(nbh);
  const auto s = train.primary_size();
  if (!s) return std::nullopt;
  const double size_t_ = target.features[*s];
  if (!(size_t_ > 0.0)) return std::nullopt;
  double sum = 0.0;
  for (const auto& a : nbh.analogies) {
    const auto& other = train.project(a.index);
    const double size_i = other.features[*s];
    if (!(size_i > 0.0)) return std::nullopt;
    sum += (size_t_ / size_i) * other.effort;
  }
  return sum / static_cast<double>(nbh.k());
}

std::optional<double> adjust_mlfe(const Project& target, const Neighborhood& nbh,
                                  const Dataset& train) {
  require_analogies(nbh);
  const auto& cols = train.size_related();
  if (cols.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& a : nbh.analogies) {
    const auto& other = train.project(a.index);
    double ratios = 0.0;
    std::size_t used = 0;
    for (auto j : cols) {
      if (other.features[j] == 0.0) continue;
      ratios += target.features[j] / other.features[j];
      ++used;
    }
    if (used == 0) return std::nullopt;
    sum += (ratios / static_cast<double>(used)) * other.effort;
  }
  return sum / static_cast<double>(nbh.k());
}

std::optional<double> adjust_aqua(const Project&, const Neighborhood& nbh, const Dataset& train) {
  require_analogies(nbh);
  // Equal weights reduce to the plain mean; computing it directly keeps that
  // identity exact instead of exact up to rounding.
  const double first = nbh.analogies.front().similarity;
  if (first > 0.0 && std::all_of(nbh.analogies.begin(), nbh.analogies.end(),
                                 [&](const Analogy& a) { return a.similarity == first; })) {
    return adjust_eba(Project{}, nbh, train);
  }
  double num = 0.0;
  double den = 0.0;
  for (const auto& a : nbh.analogies) {
    num += a.similarity * train.project(a.index).effort;
    den += a.similarity;
  }
  if (!(den > 0.0)) return std::nullopt;
  return num / den;
}

double rtm_estimate(double target_size, const RtmParams& params) {
  if (params.productivities.empty()) throw std::invalid_argument("rtm_estimate: no analogies");
  double sum = 0.0;
  for (double pr : params.productivities) sum += pr + (params.h - pr) * (1.0 - params.c);
  return target_size * (sum / static_cast<double>(params.productivities.size()));
}

namespace {

std::optional<double> productivity(const Project& p, std::size_t size_col) {
  const double s = p.features[size_col];
  if (!(s > 0.0)) return std::nullopt;
  return p.effort / s;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const auto n = x.size();
  if (n < 2) return 0.0;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double estimate_rtm_correlation(const Dataset& train) {
  if (train.size() < 2) return 0.0;
  const CaseBase base(train);
  const auto nbh = base.self_neighborhoods(1);
  return estimate_rtm_correlation(train, nbh);
}

double estimate_rtm_correlation(const Dataset& train,
                                std::span<const Neighborhood> self_neighborhoods) {
  const auto s = train.primary_size();
  if (!s) return 0.0;
  std::vector<double> analog;
  std::vector<double> actual;
  for (std::size_t p = 0; p < train.size(); ++p) {
    const auto own = productivity(train.project(p), *s);
    const auto nearest =
        productivity(train.project(self_neighborhoods[p].analogies.at(0).index), *s);
    if (!own || !nearest) continue;
    analog.push_back(*nearest);
    actual.push_back(*own);
  }
  return std::clamp(pearson(analog, actual), 0.0, 1.0);
}

namespace {

RtmModel finish_rtm(const Dataset& train, double correlation, RtmMean mean) {
  RtmModel model;
  model.correlation = correlation;
  if (mean == RtmMean::Fold) {
    const auto s = train.primary_size();
    double sum = 0.0;
    std::size_t count = 0;
    if (s) {
      for (const auto& p : train.projects()) {
        if (const auto pr = productivity(p, *s)) {
          sum += *pr;
          ++count;
        }
      }
    }
    model.mean_productivity = count > 0 ? sum / static_cast<double>(count) : 0.0;
  }
  return model;
}

}  // namespace

RtmModel fit_rtm(const Dataset& train, RtmMean mean) {
  return finish_rtm(train, estimate_rtm_correlation(train), mean);
}

RtmModel fit_rtm(const Dataset& train, std::span<const Neighborhood> self_neighborhoods,
                 RtmMean mean) {
  return finish_rtm(train, estimate_rtm_correlation(train, self_neighborhoods), mean);
}

std::optional<double> adjust_rtm(const Project& target, const Neighborhood& nbh,
                                 const Dataset& train, const RtmModel& model) {
  require_analogies(nbh);
  const auto s = train.primary_size();
  if (!s) return std::nullopt;
  const double size_t_ = target.features[*s];
  if (!(size_t_ > 0.0)) return std::nullopt;
  RtmParams params;
  params.c = model.correlation;
  for (const auto& a : nbh.analogies) {
    const auto pr = productivity(train.project(a.index), *s);
    if (!pr) return std::nullopt;
    params.productivities.push_back(*pr);
  }
  if (model.mean_productivity) {
    if (!(*model.mean_productivity > 0.0)) return std::nullopt;
    params.h = *model.mean_productivity;
  } else {
    double sum = 0.0;
    for (double pr : params.productivities) sum += pr;
    params.h = sum / static_cast<double>(params.productivities.size());
  }
  return rtm_estimate(size_t_, params);
}

double adjust_mt(const Project& target, const Neighborhood& nbh, const Dataset& train,
                 const ModelTree& tree) {
  return mean_corrected(target, nbh, train,
                        [&](const std::vector<double>& d) { return tree.predict(d); });
}

double adjust_ga(const Project& target, const Neighborhood& nbh, const Dataset& train,
                 const GaWeights& weights) {
  if (weights.alpha.size() != train.feature_count()) {
    throw std::invalid_argument("adjust_ga: weight vector length mismatch");
  }
  return mean_corrected(target, nbh, train, [&](const std::vector<double>& d) {
    double c = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) c += weights.alpha[j] * d[j];
    return c;
  });
}

double adjust_nn(const Project& target, const Neighborhood& nbh, const Dataset& train,
                 const FeedForwardNet& net) {
  return mean_corrected(target, nbh, train,
                        [&](const std::vector<double>& d) { return net.predict(d); });
}

}  // namespace ebae
