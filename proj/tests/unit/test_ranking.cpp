#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "ebae/ranking.hpp"

namespace ebae {
namespace {

// Candidates a b c d g; four voters.
PreferenceProfile four_voters() {
  PreferenceProfile p;
  p.candidates = {"a", "b", "c", "d", "g"};
  p.voter_names = {"e1", "e2", "e3", "e4"};
  const std::size_t a = 0, b = 1, c = 2, d = 3, g = 4;
  p.orders = {{b, a, d, c, g}, {a, d, b, c, g}, {b, d, a, g, c}, {a, d, g, b, c}};
  return p;
}

TEST(Margins, FourVoterProfile) {
  const auto mm = majority_margins(four_voters());
  EXPECT_EQ(mm[0][2], 4);
  EXPECT_EQ(mm[0][3], 2);
  EXPECT_EQ(mm[0][1], 0);
  for (std::size_t x = 0; x < 5; ++x) {
    EXPECT_EQ(mm[x][x], 0);
    for (std::size_t y = 0; y < 5; ++y) EXPECT_EQ(mm[x][y], -mm[y][x]);
  }
}

TEST(Margins, SingleVoterAndReversedPair) {
  PreferenceProfile one;
  one.candidates = {"x", "y", "z"};
  one.orders = {{2, 0, 1}};
  const auto mm = majority_margins(one);
  for (std::size_t x = 0; x < 3; ++x) {
    for (std::size_t y = 0; y < 3; ++y) {
      if (x != y) EXPECT_TRUE(mm[x][y] == 1 || mm[x][y] == -1);
    }
  }
  auto reversed = one;
  reversed.orders.push_back({1, 0, 2});
  for (const auto& row : majority_margins(reversed)) {
    for (int v : row) EXPECT_EQ(v, 0);
  }
}

TEST(Margins, MalformedOrdersAreRejected) {
  PreferenceProfile p;
  p.candidates = {"x", "y", "z"};
  p.orders = {{0, 1}};
  EXPECT_THROW(majority_margins(p), std::invalid_argument);
  p.orders = {{0, 1, 1}};
  EXPECT_THROW(majority_margins(p), std::invalid_argument);
  p.orders = {{0, 1, 5}};
  EXPECT_THROW(majority_margins(p), std::invalid_argument);
  p.orders = {};
  EXPECT_THROW(majority_margins(p), std::invalid_argument);
  p.candidates = {"x"};
  p.orders = {{0}};
  EXPECT_THROW(majority_margins(p), std::invalid_argument);
}

TEST(Borda, FourVoterScoresAndRanking) {
  const auto r = borda_rank(four_voters());
  EXPECT_EQ(r.scores, (std::vector<int>{10, 6, -12, 6, -10}));
  EXPECT_EQ(r.render(), "a ≻ (b~d) ≻ g ≻ c");
  EXPECT_EQ(r.rank, (std::vector<int>{1, 2, 5, 2, 4}));
  ASSERT_EQ(r.tiers.size(), 4u);
  EXPECT_EQ(r.tiers[1], (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(r.voter_ranks[0], (std::vector<int>{2, 1, 3, 1}));
}

TEST(Borda, UnanimityReproducesTheOrder) {
  PreferenceProfile p;
  p.candidates = {"p", "q", "r", "s"};
  p.orders = {{2, 0, 3, 1}, {2, 0, 3, 1}, {2, 0, 3, 1}};
  const auto r = borda_rank(p);
  EXPECT_EQ(r.render(), "r ≻ p ≻ s ≻ q");
  for (const auto& tier : r.tiers) EXPECT_EQ(tier.size(), 1u);
  for (double xi : r.xi) EXPECT_EQ(xi, 0.0);
}

PreferenceProfile random_profile(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nc(2, 9), nv(1, 6);
  PreferenceProfile p;
  const int c = nc(rng);
  for (int i = 0; i < c; ++i) p.candidates.push_back("c" + std::to_string(i));
  const int v = nv(rng);
  for (int i = 0; i < v; ++i) {
    std::vector<std::size_t> order(static_cast<std::size_t>(c));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    p.orders.push_back(order);
  }
  return p;
}

TEST(BordaProperties, AntisymmetryZeroSumRelabelingAndDominance) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const auto p = random_profile(rng);
    const auto r = borda_rank(p);
    const auto n = p.candidates.size();
    EXPECT_EQ(std::accumulate(r.scores.begin(), r.scores.end(), 0), 0);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) EXPECT_EQ(r.margins[x][y], -r.margins[y][x]);
    }
    for (std::size_t i = 1; i < r.tiers.size(); ++i) {
      EXPECT_GT(r.scores[r.tiers[i - 1][0]], r.scores[r.tiers[i][0]]);
    }

    // Voter relabeling: shuffle the order of voters.
    auto shuffled = p;
    std::shuffle(shuffled.orders.begin(), shuffled.orders.end(), rng);
    EXPECT_EQ(borda_rank(shuffled).scores, r.scores);

    // Candidate relabeling: permute indices; scores follow the candidates.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    PreferenceProfile relabeled;
    relabeled.candidates.resize(n);
    for (std::size_t c = 0; c < n; ++c) relabeled.candidates[perm[c]] = p.candidates[c];
    for (const auto& order : p.orders) {
      std::vector<std::size_t> o;
      for (auto c : order) o.push_back(perm[c]);
      relabeled.orders.push_back(o);
    }
    const auto rr = borda_rank(relabeled);
    for (std::size_t c = 0; c < n; ++c) EXPECT_EQ(rr.scores[perm[c]], r.scores[c]);

    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        if (x == y) continue;
        bool dominates = true;
        for (std::size_t v = 0; v < p.orders.size(); ++v) {
          dominates = dominates && p.rank_of(v, x) < p.rank_of(v, y);
        }
        if (dominates) EXPECT_GT(r.scores[x], r.scores[y]);
      }
    }
  }
}

TEST(Xi, MeanAbsolutePairwiseDifference) {
  EXPECT_EQ(rank_stability_xi(std::vector<int>{3, 3, 3, 3}), 0.0);
  EXPECT_EQ(rank_stability_xi(std::vector<int>{1, 3}), 2.0);
  EXPECT_DOUBLE_EQ(rank_stability_xi(std::vector<int>{1, 2, 3}), 4.0 / 3.0);
  EXPECT_THROW(rank_stability_xi(std::vector<int>{1}), std::invalid_argument);
}

TEST(Measures, AscendingVotersWithLabelTieBreak) {
  const std::vector<std::pair<std::string, std::vector<double>>> measures{
      {"MAE", {3.0, 1.0, 2.0}}, {"LSD", {0.5, 0.5, 0.1}}};
  const auto p = profile_from_measures({"z", "y", "x"}, measures);
  EXPECT_EQ(p.voter_names, (std::vector<std::string>{"MAE", "LSD"}));
  EXPECT_EQ(p.orders[0], (std::vector<std::size_t>{1, 2, 0}));
  // y and z tie on LSD; "y" < "z".
  EXPECT_EQ(p.orders[1], (std::vector<std::size_t>{2, 1, 0}));
  const std::vector<std::pair<std::string, std::vector<double>>> short_measure{{"MAE", {1.0}}};
  EXPECT_THROW(profile_from_measures({"a", "b"}, short_measure), std::invalid_argument);
}

}  // namespace
}  // namespace ebae
