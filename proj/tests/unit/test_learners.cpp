#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ebae/analogy.hpp"
#include "ebae/error.hpp"
#include "ebae/learners.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace ebae {
namespace {

TEST(DiffPairs, TwoProjectsPointAtEachOther) {
  const auto train = test::sized({{3, 10}, {7, 25}});
  const auto pairs = build_diff_pairs(train);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].feature_diff[0], -4.0);
  EXPECT_EQ(pairs[0].effort_diff, -15.0);
  EXPECT_EQ(pairs[1].feature_diff[0], 4.0);
  EXPECT_EQ(pairs[1].effort_diff, 15.0);
}

TEST(DiffPairs, DuplicateProjectGivesZeroPair) {
  const auto train = test::sized({{3, 10}, {3, 10}, {9, 40}});
  const auto pairs = build_diff_pairs(train);
  EXPECT_EQ(pairs[0].feature_diff[0], 0.0);
  EXPECT_EQ(pairs[0].effort_diff, 0.0);
}

TEST(DiffPairs, ToyMatchesBruteForceNearestNeighbor) {
  const auto ds = test::toy();
  const auto pairs = build_diff_pairs(ds);
  ASSERT_EQ(pairs.size(), 5u);
  for (std::size_t p = 0; p < ds.size(); ++p) {
    // One feature: nearest is the smallest |size difference|, lower index on ties.
    std::size_t best = p == 0 ? 1 : 0;
    for (std::size_t q = 0; q < ds.size(); ++q) {
      if (q == p) continue;
      const double dq = std::abs(ds.project(q).features[0] - ds.project(p).features[0]);
      const double db = std::abs(ds.project(best).features[0] - ds.project(p).features[0]);
      if (dq < db) best = q;
    }
    EXPECT_EQ(pairs[p].feature_diff[0],
              ds.project(p).features[0] - ds.project(best).features[0]);
    EXPECT_EQ(pairs[p].effort_diff, ds.project(p).effort - ds.project(best).effort);
  }
}

std::vector<DiffPair> linear_pairs(double slope, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<DiffPair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = u(rng);
    pairs.push_back({{x}, slope * x});
  }
  return pairs;
}

TEST(ModelTreeFit, ConstantTargetGivesSingleLeaf) {
  std::vector<DiffPair> pairs;
  for (int i = 0; i < 12; ++i) pairs.push_back({{double(i), double(i * i)}, 4.5});
  const auto tree = fit_model_tree(pairs, {});
  EXPECT_EQ(tree.leaf_count(), 1u);
  for (double x : {-100.0, 0.0, 3.3, 1e6}) {
    const std::vector<double> in{x, -x};
    EXPECT_NEAR(tree.predict(in), 4.5, 1e-9);
  }
}

TEST(ModelTreeFit, ExactLineRecoveredAtTrainingPoints) {
  const auto pairs = linear_pairs(3.0, 20, 8);
  const auto tree = fit_model_tree(pairs, {});
  for (const auto& p : pairs) EXPECT_NEAR(tree.predict(p.feature_diff), p.effort_diff, 1e-6);
  const std::vector<double> two{2.0};
  EXPECT_NEAR(predict_model_tree(tree, two), 6.0, 1e-6);
}

TEST(ModelTreeFit, TooFewPairsFail) {
  const auto pairs = linear_pairs(1.0, 7, 1);
  EXPECT_THROW(fit_model_tree(pairs, {4, 6}), FitFailure);
  EXPECT_NO_THROW(fit_model_tree(linear_pairs(1.0, 8, 1), {4, 6}));
}

TEST(ModelTreePredict, ConstantTreeAndBoundaryGoesLeft) {
  const auto c = ModelTree::constant(-2.5, 3);
  const std::vector<double> any{1, 2, 3};
  EXPECT_EQ(c.predict(any), -2.5);

  std::vector<ModelTree::Node> nodes(3);
  nodes[0].feature = 0;
  nodes[0].threshold = 1.0;
  nodes[0].left = 1;
  nodes[0].right = 2;
  nodes[1].intercept = 10.0;
  nodes[1].coefficients = {0.0};
  nodes[1].depth = 1;
  nodes[2].intercept = 20.0;
  nodes[2].coefficients = {0.0};
  nodes[2].depth = 1;
  const ModelTree tree(nodes, 1);
  const std::vector<double> on{1.0};
  const std::vector<double> above{std::nextafter(1.0, 2.0)};
  EXPECT_EQ(tree.predict(on), 10.0);
  EXPECT_EQ(tree.predict(above), 20.0);
  EXPECT_EQ(tree.depth(), 1);
}

TEST(ModelTreeFit, StructuralInvariantsAndTrainingErrorBound) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<DiffPair> pairs;
    const std::size_t n = 20 + seed * 5;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = u(rng);
      const double b = u(rng);
      pairs.push_back({{a, b}, (a > 0 ? 5.0 : -2.0) + b * b + noise(rng)});
    }
    const ModelTreeConfig cfg{4, 6};
    const auto tree = fit_model_tree(pairs, cfg);
    EXPECT_LE(tree.depth(), cfg.max_depth);
    for (const auto& node : tree.nodes()) {
      if (node.is_leaf()) EXPECT_GE(node.samples, static_cast<std::size_t>(cfg.min_leaf));
    }
    double mean = 0;
    for (const auto& p : pairs) mean += p.effort_diff / static_cast<double>(n);
    double sse_tree = 0, sse_const = 0;
    for (const auto& p : pairs) {
      const double r = p.effort_diff - tree.predict(p.feature_diff);
      sse_tree += r * r;
      sse_const += (p.effort_diff - mean) * (p.effort_diff - mean);
    }
    EXPECT_LE(sse_tree, sse_const * (1 + 1e-12)) << "seed " << seed;
  }
}

TEST(Network, SameSeedGivesBitIdenticalWeights) {
  const auto pairs = linear_pairs(2.0, 30, 4);
  const auto a = fit_network(pairs, {}, 99);
  const auto b = fit_network(pairs, {}, 99);
  ASSERT_EQ(a.parameter_count(), b.parameter_count());
  for (std::size_t i = 0; i < a.parameter_count(); ++i) {
    EXPECT_EQ(a.parameters()[i], b.parameters()[i]);
  }
  const auto c = fit_network(pairs, {}, 100);
  EXPECT_NE(std::vector<double>(a.parameters().begin(), a.parameters().end()),
            std::vector<double>(c.parameters().begin(), c.parameters().end()));
}

TEST(Network, ZeroTargetGivesNearZeroOutput) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 3.0);
  std::vector<DiffPair> pairs;
  for (int i = 0; i < 40; ++i) pairs.push_back({{g(rng), g(rng)}, 0.0});
  double spread = 0;
  for (std::size_t j = 0; j < 2; ++j) {
    double m = 0, v = 0;
    for (const auto& p : pairs) m += p.feature_diff[j] / 40.0;
    for (const auto& p : pairs) v += (p.feature_diff[j] - m) * (p.feature_diff[j] - m) / 39.0;
    spread = std::max(spread, std::sqrt(v));
  }
  const auto net = fit_network(pairs, {}, 5);
  for (const auto& p : pairs) EXPECT_LT(std::abs(net.predict(p.feature_diff)), 0.05 * spread);
}

TEST(Network, TooFewPairsOrDivergenceFail) {
  EXPECT_THROW(fit_network(linear_pairs(1.0, 3, 2), {}, 1), FitFailure);
  NetworkConfig wild;
  wild.learning_rate = 1e300;
  EXPECT_THROW(fit_network(linear_pairs(1.0, 20, 2), wild, 1), FitFailure);
}

class GradientCheck : public ::testing::TestWithParam<int> {};

TEST_P(GradientCheck, AnalyticMatchesCentralDifferences) {
  const auto hidden = static_cast<std::size_t>(GetParam());
  const std::size_t inputs = 3;
  std::mt19937_64 rng(hidden * 31);
  std::normal_distribution<double> g(0.0, 0.7);
  FeedForwardNet net(inputs, hidden);
  for (auto& p : net.parameters()) p = g(rng);
  std::vector<std::vector<double>> x(12, std::vector<double>(inputs));
  std::vector<double> y(12);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (auto& v : x[i]) v = g(rng);
    y[i] = g(rng);
  }
  std::vector<double> grad;
  net.loss_and_gradient(x, y, grad);
  ASSERT_EQ(grad.size(), net.parameter_count());

  std::uniform_int_distribution<std::size_t> pick(0, net.parameter_count() - 1);
  for (int trial = 0; trial < 5; ++trial) {
    const auto i = trial == 4 ? net.parameter_count() - 1 : pick(rng);
    const double h = 1e-5;
    const double saved = net.parameters()[i];
    net.parameters()[i] = saved + h;
    const double up = net.loss(x, y);
    net.parameters()[i] = saved - h;
    const double down = net.loss(x, y);
    net.parameters()[i] = saved;
    const double numeric = (up - down) / (2 * h);
    const double scale = std::max({std::abs(numeric), std::abs(grad[i]), 1e-8});
    EXPECT_LT(std::abs(numeric - grad[i]) / scale, 1e-4) << "parameter " << i;
  }
}

INSTANTIATE_TEST_SUITE_P(HiddenSizes, GradientCheck, ::testing::Values(2, 4, 8));

using test::loo_mae;
using test::planted;

TEST(Ga, PlantedWeightRecoveredAndConfirmedByGridSearch) {
  const auto train = planted();
  const auto w = fit_ga_weights(train, 1, GaConfig{}, 12);
  ASSERT_EQ(w.alpha.size(), 1u);
  EXPECT_GE(w.alpha[0], 1.5);
  EXPECT_LE(w.alpha[0], 2.5);

  double best_alpha = 0, best = 1e300;
  for (int i = -500; i <= 500; ++i) {
    const double a = i / 100.0;
    const double f = loo_mae(train, 1, a);
    if (f < best) {
      best = f;
      best_alpha = a;
    }
  }
  EXPECT_NEAR(best_alpha, 2.0, 1e-9);
  EXPECT_NEAR(GaObjective(train, 1)(w.alpha), loo_mae(train, 1, w.alpha[0]), 1e-9);
  EXPECT_LT(w.fitness, loo_mae(train, 1, 0.0));
}

TEST(Ga, NeverWorseThanZeroWeightsAndMonotoneHistory) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto train = test::random_dataset(14, 3, seed, true);
    const GaObjective objective(train, 2);
    GaConfig cfg;
    cfg.generations = 30;
    const auto w = fit_ga_weights(objective, cfg, seed);
    const std::vector<double> zero(train.feature_count(), 0.0);
    EXPECT_LE(w.fitness, objective(zero));
    EXPECT_EQ(w.fitness, objective(w.alpha));
    ASSERT_EQ(w.history.size(), 31u);
    for (std::size_t g = 1; g < w.history.size(); ++g) EXPECT_LE(w.history[g], w.history[g - 1]);
    for (double a : w.alpha) {
      EXPECT_TRUE(std::isfinite(a));
      EXPECT_LE(std::abs(a), cfg.range);
    }
  }
}

TEST(Ga, SameSeedSameWeights) {
  const auto train = test::random_dataset(12, 2, 3);
  const auto a = fit_ga_weights(train, 3, GaConfig{}, 8);
  const auto b = fit_ga_weights(train, 3, GaConfig{}, 8);
  EXPECT_EQ(a.alpha, b.alpha);
  EXPECT_EQ(a.history, b.history);
}

TEST(Ga, NeedsKPlusTwoProjects) {
  const auto train = test::random_dataset(4, 2, 3);
  EXPECT_THROW(fit_ga_weights(train, 3, GaConfig{}, 1), std::invalid_argument);
  EXPECT_NO_THROW(fit_ga_weights(train, 2, GaConfig{}, 1));
}

TEST(LearnerConfig, MapsDefaults) {
  const LearnerConfig c;
  EXPECT_EQ(tree_config(c).min_leaf, 4);
  EXPECT_EQ(tree_config(c).max_depth, 6);
  EXPECT_EQ(network_config(c).hidden, 4);
  EXPECT_EQ(network_config(c).epochs, 500);
  EXPECT_EQ(network_config(c).learning_rate, 0.01);
  const auto g = ga_config(c);
  EXPECT_EQ(g.population, 50);
  EXPECT_EQ(g.generations, 100);
  EXPECT_EQ(g.crossover_rate, 0.8);
  EXPECT_EQ(g.mutation_rate, 0.1);
  EXPECT_EQ(g.range, 5.0);
}

}  // namespace
}  // namespace ebae
