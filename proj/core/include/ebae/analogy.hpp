#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ebae/data.hpp"

namespace ebae {

struct Analogy {
  std::size_t index = 0;  ///< row index in the pool dataset
  double distance = 0.0;
  double similarity = 1.0;  ///< 1 / (1 + distance)

  friend bool operator==(const Analogy&, const Analogy&) = default;
};

/// The k nearest pool projects for one target, nearest first.
struct Neighborhood {
  std::string target_id;
  std::vector<Analogy> analogies;

  std::size_t k() const { return analogies.size(); }
  /// The first `k` analogies; retrieval at k is a prefix of retrieval at k+1.
  Neighborhood prefix(std::size_t k) const;
};

double similarity_from_distance(double distance);

/// Un-weighted Euclidean distance over normalized feature vectors;
/// categorical features contribute 1 when their codes differ.
double distance(std::span<const double> x, std::span<const double> y,
                std::span<const FeatureSpec> features);

/// Normalized case base over a pool of projects. Normalization bounds come
/// from the pool; targets outside the pool range are clamped to [0,1].
class CaseBase {
 public:
  explicit CaseBase(const Dataset& pool);

  const Dataset& pool() const { return *pool_; }
  const MinMaxScaler& scaler() const { return scaler_; }
  const std::vector<double>& normalized(std::size_t row) const { return rows_.at(row); }

  /// k nearest pool projects to `target`; equal distances are ordered by
  /// smaller row index. `exclude` removes one pool row from the candidates
  /// (leave-self-out retrieval inside the pool). Throws std::invalid_argument
  /// if fewer than k candidates remain.
  Neighborhood retrieve(const Project& target, std::size_t k,
                        std::optional<std::size_t> exclude = std::nullopt) const;

  /// Leave-self-out neighborhoods of every pool project.
  std::vector<Neighborhood> self_neighborhoods(std::size_t k) const;

 private:
  Neighborhood retrieve_normalized(const std::string& id, std::span<const double> target,
                                   std::size_t k, std::optional<std::size_t> exclude) const;

  const Dataset* pool_;
  MinMaxScaler scaler_;
  std::vector<std::vector<double>> rows_;
};

/// Convenience: builds a CaseBase over `pool` (which must not contain the
/// target) and retrieves the k nearest analogies.
Neighborhood retrieve(const Project& target, const Dataset& pool, std::size_t k);

}  // namespace ebae
