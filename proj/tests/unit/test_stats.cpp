#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "ebae/error.hpp"
#include "ebae/stats.hpp"
#include "oracles.hpp"

namespace ebae {
namespace {

using test::normal_groups;
using test::oracle_partition;
using test::pool;
using test::sizes_of;

TEST(BoxCox, LogBranchAndAffineCase) {
  const std::vector<double> e{std::numbers::e};
  EXPECT_DOUBLE_EQ(apply_box_cox(e, {0.0, 0.0})[0], 1.0);
  const std::vector<double> x{0.5, 2, 7, 100};
  const auto y = apply_box_cox(x, {1.0, 0.0});
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_DOUBLE_EQ(y[i], x[i] - 1);
  EXPECT_THROW(box_cox_value(0.0, 0.5), std::invalid_argument);
  EXPECT_THROW(box_cox(std::vector<double>{}), std::invalid_argument);
}

// Equivalent criterion: the lambda minimizing the variance of the
// geometric-mean normalized transform maximizes the profile likelihood.
double oracle_lambda(const std::vector<double>& x) {
  double log_gm = 0;
  for (double v : x) log_gm += std::log(v) / static_cast<double>(x.size());
  const double gm = std::exp(log_gm);
  double best_lambda = 0, best_var = 1e300;
  for (int i = -200; i <= 200; ++i) {
    const double l = i / 100.0;
    std::vector<double> z;
    for (double v : x) {
      z.push_back(l == 0 ? gm * std::log(v) : (std::pow(v, l) - 1) / (l * std::pow(gm, l - 1)));
    }
    const double m = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
    double var = 0;
    for (double v : z) var += (v - m) * (v - m);
    if (var < best_var) {
      best_var = var;
      best_lambda = l;
    }
  }
  return best_lambda;
}

TEST(BoxCox, LogNormalSampleSelectsLambdaNearZero) {
  std::mt19937_64 rng(2023);
  std::lognormal_distribution<double> d(1.0, 0.8);
  std::vector<double> x(200);
  for (auto& v : x) v = d(rng);
  const auto spec = fit_box_cox(x);
  EXPECT_EQ(spec.shift, 0.0);
  EXPECT_GE(spec.lambda, -0.2);
  EXPECT_LE(spec.lambda, 0.2);
  EXPECT_NEAR(spec.lambda, oracle_lambda(x), 0.011);
}

TEST(BoxCox, GridChoiceMatchesOracleOnSkewedSamples) {
  std::mt19937_64 rng(4);
  std::gamma_distribution<double> d(2.0, 3.0);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> x(50 + rep * 10);
    for (auto& v : x) v = d(rng) + 0.01;
    EXPECT_NEAR(fit_box_cox(x).lambda, oracle_lambda(x), 0.011) << "rep " << rep;
  }
}

TEST(BoxCox, ShiftMakesInputsPositive) {
  EXPECT_DOUBLE_EQ(fit_box_cox(std::vector<double>{0, 1, 2}).shift, 0.002);
  EXPECT_DOUBLE_EQ(fit_box_cox(std::vector<double>{-1, 3}).shift, 1.003);
  EXPECT_DOUBLE_EQ(fit_box_cox(std::vector<double>{-2, -1}).shift, 3.0);
  const auto r = box_cox(std::vector<double>{0, 0.5, 3, 9});
  for (double v : r.values) EXPECT_TRUE(std::isfinite(v));
}

TEST(ChiSquared, MatchesTabulatedQuantiles) {
  EXPECT_NEAR(chi_squared_critical(1, 0.05), 3.841459, 1e-6);
  EXPECT_NEAR(chi_squared_critical(2, 0.05), 5.991465, 1e-6);
  EXPECT_NEAR(chi_squared_critical(10, 0.01), 23.209251, 1e-6);
  EXPECT_THROW(chi_squared_critical(3, 0.0), std::invalid_argument);
}

TEST(Lilliefors, TableLookupInterpolationAndAsymptote) {
  EXPECT_EQ(lilliefors_critical(10, 0.05), 0.258);
  EXPECT_EQ(lilliefors_critical(25, 0.01), 0.200);
  EXPECT_NEAR(lilliefors_critical(22, 0.05), 0.190 + 0.4 * (0.173 - 0.190), 1e-12);
  EXPECT_NEAR(lilliefors_critical(500, 0.05), 0.886 / std::sqrt(500.0), 1e-12);
  EXPECT_THROW(lilliefors_critical(10, 0.07), std::invalid_argument);
}

double normal_cdf(double x, double m, double s) {
  return 0.5 * std::erfc(-(x - m) / (s * std::sqrt(2.0)));
}

// Largest gap between the empirical and fitted CDF, evaluated on both sides
// of every jump.
double oracle_ks(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0;
  for (double v : x) ss += (v - m) * (v - m);
  const double s = std::sqrt(ss / (n - 1));
  double d = 0;
  for (double point : x) {
    for (double probe : {std::nextafter(point, -1e300), point}) {
      const double ecdf =
          static_cast<double>(std::upper_bound(x.begin(), x.end(), probe) - x.begin()) / n;
      d = std::max(d, std::abs(ecdf - normal_cdf(probe, m, s)));
    }
  }
  return d;
}

TEST(Ks, NormalSampleIsNotRejected) {
  std::mt19937_64 rng(500);
  std::normal_distribution<double> d;
  std::vector<double> x(500);
  for (auto& v : x) v = d(rng);
  const auto r = ks_normality(x, 0.05);
  EXPECT_FALSE(r.reject) << r.statistic << " vs " << r.critical;
  EXPECT_NEAR(r.statistic, oracle_ks(x), 1e-9);
  EXPECT_NEAR(r.critical, 0.886 / std::sqrt(500.0), 1e-12);
}

TEST(Ks, ExponentialSampleIsRejected) {
  std::mt19937_64 rng(501);
  std::exponential_distribution<double> d(1.0);
  std::vector<double> x(500);
  for (auto& v : x) v = d(rng);
  const auto r = ks_normality(x, 0.05);
  EXPECT_TRUE(r.reject);
  EXPECT_NEAR(r.statistic, oracle_ks(x), 1e-9);
}

TEST(Ks, DegenerateInputs) {
  EXPECT_THROW(ks_normality(std::vector<double>(10, 3.0), 0.05), DegenerateInput);
  EXPECT_THROW(ks_normality(std::vector<double>{1, 2, 3, 4}, 0.05), std::invalid_argument);
}

TEST(ScottKnott, NullCaseGivesSingleCluster) {
  const auto groups = normal_groups({0, 0, 0, 0, 0, 0}, 1.0, 30, 10);
  const auto r = scott_knott(groups, 0.01);
  ASSERT_EQ(r.clusters.size(), 1u);
  EXPECT_EQ(r.clusters[0].members.size(), 6u);
}

TEST(ScottKnott, TwoLevelFixtureSeparatesLowFromHighAndMatchesOracle) {
  const auto groups = normal_groups({1.0, 1.1, 5.0, 5.1}, 0.1, 30, 7);
  const auto r = scott_knott(groups, 0.05);
  const auto p = pool(groups);
  std::vector<std::size_t> expected;
  oracle_partition(p.sorted_means, 0, 4, p.mse / p.r, p.df, 0.05, expected);
  EXPECT_EQ(sizes_of(r), expected);
  for (const char* hi : {"C", "D"}) {
    EXPECT_NE(r.cluster_of(hi), r.cluster_of("A"));
    EXPECT_NE(r.cluster_of(hi), r.cluster_of("B"));
  }
  const auto first = scott_knott_split(p.sorted_means, p.mse / p.r, p.df, 0.05);
  EXPECT_TRUE(first.significant);
  EXPECT_EQ(first.left_size, 2u);
}

TEST(ScottKnott, ClustersConcatenateToMeanSortedList) {
  const auto groups = normal_groups({3, 1, 4, 1.5, 9, 2.6, 5}, 0.5, 20, 3);
  const auto r = scott_knott(groups, 0.05);
  std::vector<std::pair<double, std::string>> by_mean;
  for (const auto& g : groups) {
    by_mean.emplace_back(std::accumulate(g.values.begin(), g.values.end(), 0.0) / 20.0, g.label);
  }
  std::sort(by_mean.begin(), by_mean.end());
  std::vector<std::string> expected;
  for (const auto& [m, l] : by_mean) expected.push_back(l);
  EXPECT_EQ(r.ordered_labels(), expected);
  for (std::size_t c = 1; c < r.clusters.size(); ++c) {
    EXPECT_LE(r.clusters[c - 1].means.back(), r.clusters[c].means.front());
    EXPECT_LT(r.clusters[c - 1].mean, r.clusters[c].mean);
  }
}

TEST(ScottKnott, ShiftingAllObservationsLeavesClusteringUnchanged) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto groups = normal_groups({0, 0.3, 0.6, 2, 2.2, 4}, 0.6, 15, seed);
    const auto before = scott_knott(groups, 0.05);
    for (auto& g : groups) {
      for (auto& v : g.values) v += 100.0;
    }
    const auto after = scott_knott(groups, 0.05);
    EXPECT_EQ(sizes_of(before), sizes_of(after)) << "seed " << seed;
    EXPECT_EQ(before.ordered_labels(), after.ordered_labels());
  }
}

TEST(ScottKnott, RecursiveMatchesExhaustiveOnRandomGroups) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> count(2, 8);
  std::uniform_real_distribution<double> mean(0.0, 3.0);
  std::uniform_real_distribution<double> sd(0.2, 1.5);
  std::size_t multi = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> means(static_cast<std::size_t>(count(rng)));
    for (auto& m : means) m = mean(rng);
    const auto groups = normal_groups(means, sd(rng), 5 + trial % 20, rng());
    for (double alpha : {0.05, 0.01}) {
      const auto r = scott_knott(groups, alpha);
      const auto p = pool(groups);
      std::vector<std::size_t> expected;
      oracle_partition(p.sorted_means, 0, p.sorted_means.size(), p.mse / p.r, p.df, alpha,
                       expected);
      ASSERT_EQ(sizes_of(r), expected) << "trial " << trial << " alpha " << alpha;
      multi += expected.size() > 1 ? 1 : 0;
    }
  }
  EXPECT_GT(multi, 50u);
}

TEST(ScottKnott, StricterAlphaOnlyCoarsens) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto groups = normal_groups({0, 0.4, 0.8, 1.2, 1.6, 2.0, 2.4, 2.8}, 1.0, 12, seed);
    auto boundaries = [&](double alpha) {
      std::vector<std::size_t> b;
      std::size_t pos = 0;
      for (auto s : sizes_of(scott_knott(groups, alpha))) b.push_back(pos += s);
      return b;
    };
    const auto loose = boundaries(0.05);
    for (auto b : boundaries(0.01)) {
      EXPECT_NE(std::find(loose.begin(), loose.end(), b), loose.end()) << "seed " << seed;
    }
  }
}

TEST(ScottKnott, RejectsTooFewGroupsOrObservations) {
  EXPECT_THROW(scott_knott(normal_groups({1}, 1, 5, 1), 0.05), std::invalid_argument);
  EXPECT_THROW(scott_knott(normal_groups({1, 2}, 1, 1, 1), 0.05), std::invalid_argument);
  const auto r = scott_knott(normal_groups({1, 2}, 1, 5, 1), 0.05);
  EXPECT_THROW(r.cluster_of("Z"), std::out_of_range);
  EXPECT_THROW(scott_knott_partition(std::vector<double>{2, 1}, 1, 1, 0.05),
               std::invalid_argument);
}

std::vector<Cell> layout(double shift_for_last, double sd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Cell> cells;
  const char* types[] = {"EBA", "LSE", "MLFE", "RTM", "AQUA", "MT", "GA", "NN"};
  for (int t = 0; t < 8; ++t) {
    for (int k = 1; k <= 5; ++k) {
      std::normal_distribution<double> d(t == 7 ? shift_for_last : 0.0, sd);
      Cell c{types[t], k, {}};
      for (int i = 0; i < 20; ++i) c.values.push_back(d(rng));
      cells.push_back(std::move(c));
    }
  }
  return cells;
}

TEST(ScottKnottTwoWay, NullLayoutGivesSingleCluster) {
  const auto r = scott_knott_two_way(layout(0.0, 1.0, 3), 0.05);
  ASSERT_EQ(r.clusters.size(), 1u);
  EXPECT_EQ(r.clusters[0].members.size(), 8u);
}

TEST(ScottKnottTwoWay, ShiftedTypeIsIsolatedAndMatchesPooledOneWayOracle) {
  const auto cells = layout(10.0, 1.0, 4);
  const auto r = scott_knott_two_way(cells, 0.05);
  ASSERT_GE(r.clusters.size(), 2u);
  EXPECT_EQ(r.clusters.back().members, std::vector<std::string>{"NN"});

  // Per-type grand means and the within-cell residual mean square.
  std::vector<std::string> labels;
  std::vector<double> sums(8, 0.0), counts(8, 0.0);
  double within = 0, n = 0;
  for (const auto& c : cells) {
    auto it = std::find(labels.begin(), labels.end(), c.treatment);
    if (it == labels.end()) labels.push_back(c.treatment);
    const auto t = static_cast<std::size_t>(
        std::find(labels.begin(), labels.end(), c.treatment) - labels.begin());
    const double m = std::accumulate(c.values.begin(), c.values.end(), 0.0) / c.values.size();
    for (double v : c.values) {
      within += (v - m) * (v - m);
      sums[t] += v;
    }
    counts[t] += static_cast<double>(c.values.size());
    n += static_cast<double>(c.values.size());
  }
  const double df = n - static_cast<double>(cells.size());
  std::vector<double> means;
  for (std::size_t t = 0; t < 8; ++t) means.push_back(sums[t] / counts[t]);
  for (const auto& cl : r.clusters) {
    for (std::size_t i = 0; i < cl.members.size(); ++i) {
      const auto t = static_cast<std::size_t>(
          std::find(labels.begin(), labels.end(), cl.members[i]) - labels.begin());
      EXPECT_NEAR(cl.means[i], means[t], 1e-9);
    }
  }
  std::sort(means.begin(), means.end());
  std::vector<std::size_t> expected;
  oracle_partition(means, 0, 8, within / df / counts[0], df, 0.05, expected);
  EXPECT_EQ(sizes_of(r), expected);
}

TEST(ScottKnottTwoWay, RejectsEmptyCellsAndSingleTreatment) {
  auto cells = layout(0.0, 1.0, 5);
  cells[3].values.clear();
  EXPECT_THROW(scott_knott_two_way(cells, 0.05), std::invalid_argument);
  std::vector<Cell> one{{"EBA", 1, {1, 2, 3}}, {"EBA", 2, {2, 3, 4}}};
  EXPECT_THROW(scott_knott_two_way(one, 0.05), std::invalid_argument);
}

}  // namespace
}  // namespace ebae
