#include "ebae/analogy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ebae {

Neighborhood Neighborhood::prefix(std::size_t k) const {
  if (k > analogies.size()) throw std::invalid_argument("Neighborhood::prefix: k too large");
  Neighborhood out{target_id, {}};
  out.analogies.assign(analogies.begin(), analogies.begin() + static_cast<std::ptrdiff_t>(k));
  return out;
}

double similarity_from_distance(double distance) { return 1.0 / (1.0 + distance); }

double distance(std::span<const double> x, std::span<const double> y,
                std::span<const FeatureSpec> features) {
  if (x.size() != features.size() || y.size() != features.size()) {
    throw std::invalid_argument("distance: schema mismatch");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < features.size(); ++j) {
    if (features[j].kind == Kind::Continuous) {
      const double d = x[j] - y[j];
      sum += d * d;
    } else if (x[j] != y[j]) {
      sum += 1.0;
    }
  }
  return std::sqrt(sum);
}

CaseBase::CaseBase(const Dataset& pool) : pool_(&pool), scaler_(pool) {
  rows_.reserve(pool.size());
  for (const auto& p : pool.projects()) rows_.push_back(scaler_.transform(p.features));
}

Neighborhood CaseBase::retrieve(const Project& target, std::size_t k,
                                std::optional<std::size_t> exclude) const {
  const auto normalized = scaler_.transform(target.features);
  return retrieve_normalized(target.id, normalized, k, exclude);
}

Neighborhood CaseBase::retrieve_normalized(const std::string& id,
                                           std::span<const double> target, std::size_t k,
                                           std::optional<std::size_t> exclude) const {
  const std::size_t candidates = rows_.size() - (exclude && *exclude < rows_.size() ? 1 : 0);
  if (k == 0 || k > candidates) {
    throw std::invalid_argument("retrieve: pool has fewer candidates than k");
  }
  std::vector<Analogy> all;
  all.reserve(rows_.size());
  const auto& features = pool_->features();
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (exclude && i == *exclude) continue;
    const double d = distance(target, rows_[i], features);
    all.push_back({i, d, similarity_from_distance(d)});
  }
  const auto closer = [](const Analogy& a, const Analogy& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), closer);
  all.resize(k);
  return {id, std::move(all)};
}

std::vector<Neighborhood> CaseBase::self_neighborhoods(std::size_t k) const {
  std::vector<Neighborhood> out;
  out.reserve(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    out.push_back(retrieve_normalized(pool_->project(i).id, rows_[i], k, i));
  }
  return out;
}

Neighborhood retrieve(const Project& target, const Dataset& pool, std::size_t k) {
  const CaseBase base(pool);
  return base.retrieve(target, k);
}

}  // namespace ebae
