#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ebae {

/// Voters rank all candidates; each order lists candidate indices best first.
struct PreferenceProfile {
  std::vector<std::string> candidates;
  std::vector<std::string> voter_names;
  std::vector<std::vector<std::size_t>> orders;

  /// Throws std::invalid_argument unless every order is a permutation of
  /// the candidates, there are >= 2 candidates and >= 1 voter.
  void validate() const;
  /// rank (1 = best) that voter v gives to candidate c.
  int rank_of(std::size_t voter, std::size_t candidate) const;
};

using MarginMatrix = std::vector<std::vector<int>>;

/// MM[x][y] = #voters preferring x over y minus #voters preferring y over x.
MarginMatrix majority_margins(const PreferenceProfile& profile);

struct RankingOutcome {
  std::vector<std::string> candidates;
  MarginMatrix margins;
  std::vector<int> scores;
  /// Candidate indices grouped by equal score, best tier first.
  std::vector<std::vector<std::size_t>> tiers;
  /// Competition rank (1, 2, 2, 4, ...) per candidate.
  std::vector<int> rank;
  std::vector<double> xi;
  std::vector<std::string> voter_names;
  /// voter_ranks[c][v]: rank voter v gives candidate c.
  std::vector<std::vector<int>> voter_ranks;

  /// e.g. "a ≻ (b~d) ≻ g ≻ c"
  std::string render() const;
};

RankingOutcome borda_rank(const PreferenceProfile& profile);

/// Mean absolute difference over all pairs of a candidate's per-voter ranks.
/// Throws std::invalid_argument with fewer than 2 ranks.
double rank_stability_xi(std::span<const int> ranks);

/// One ascending voter per measure; ties within a measure go to the
/// lexicographically smaller label.
PreferenceProfile profile_from_measures(
    std::vector<std::string> labels,
    std::span<const std::pair<std::string, std::vector<double>>> measures);

}  // namespace ebae
