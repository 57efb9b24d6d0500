#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ebae/analogy.hpp"
#include "ebae/config.hpp"
#include "ebae/data.hpp"

namespace ebae {

/// Feature and effort difference between a training project and its nearest
/// within-training analogy (project minus analogy).
struct DiffPair {
  std::vector<double> feature_diff;
  double effort_diff = 0.0;
};

/// One pair per training project, paired with its nearest leave-self-out
/// analogy. `neighborhoods`, when given, must be `CaseBase(train).self_neighborhoods(k)`.
std::vector<DiffPair> build_diff_pairs(const Dataset& train);
std::vector<DiffPair> build_diff_pairs(const Dataset& train,
                                       std::span<const Neighborhood> neighborhoods);

// ---------------------------------------------------------------------------
// Model tree

struct ModelTreeConfig {
  int min_leaf = 4;
  int max_depth = 6;
};

/// Binary regression tree with least-squares linear models in the leaves.
/// Inputs equal to a split threshold go left.
class ModelTree {
 public:
  struct Node {
    // Internal nodes: split on `feature` at `threshold`; children indices.
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    // Leaves: intercept + coefficients (all zero for a constant leaf).
    double intercept = 0.0;
    std::vector<double> coefficients;
    std::size_t samples = 0;
    int depth = 0;

    bool is_leaf() const { return feature < 0; }
  };

  ModelTree() = default;
  ModelTree(std::vector<Node> nodes, std::size_t input_size);

  double predict(std::span<const double> feature_diff) const;
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t input_size() const { return input_size_; }
  std::size_t leaf_count() const;
  int depth() const;

  /// Single-leaf tree that predicts `value` everywhere.
  static ModelTree constant(double value, std::size_t input_size);

 private:
  std::vector<Node> nodes_;
  std::size_t input_size_ = 0;
};

/// Greedy variance-reduction splits; throws FitFailure with fewer than
/// 2 * min_leaf pairs.
ModelTree fit_model_tree(std::span<const DiffPair> pairs, const ModelTreeConfig& config);
double predict_model_tree(const ModelTree& tree, std::span<const double> feature_diff);

// ---------------------------------------------------------------------------
// Feed-forward network: inputs -> tanh hidden layer -> linear output.

struct NetworkConfig {
  int hidden = 4;
  int epochs = 500;
  double learning_rate = 0.01;
};

class FeedForwardNet {
 public:
  FeedForwardNet() = default;
  /// Network with zero weights and identity standardization.
  FeedForwardNet(std::size_t inputs, std::size_t hidden);

  std::size_t inputs() const { return inputs_; }
  std::size_t hidden() const { return hidden_; }

  /// Parameter layout: W1 (hidden x inputs, row-major), b1 (hidden),
  /// w2 (hidden), b2.
  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::size_t parameter_count() const { return params_.size(); }

  /// Prediction in raw (unstandardized) units.
  double predict(std::span<const double> feature_diff) const;
  /// Output for an already-standardized input, in standardized units.
  double forward(std::span<const double> standardized) const;

  /// Mean squared error over standardized rows and its gradient with
  /// respect to `parameters()`.
  double loss(std::span<const std::vector<double>> inputs, std::span<const double> targets) const;
  double loss_and_gradient(std::span<const std::vector<double>> inputs,
                           std::span<const double> targets, std::vector<double>& gradient) const;

  struct Standardization {
    std::vector<double> input_mean;
    std::vector<double> input_scale;
    double target_mean = 0.0;
    double target_scale = 1.0;
  };
  const Standardization& standardization() const { return standardization_; }
  void set_standardization(Standardization s);

 private:
  std::size_t inputs_ = 0;
  std::size_t hidden_ = 0;
  std::vector<double> params_;
  Standardization standardization_;
};

/// Full-batch gradient descent on standardized pairs. Hidden weights are
/// drawn from the seeded generator, output weights start at zero.
/// Throws FitFailure with fewer than 4 pairs or on non-finite loss.
FeedForwardNet fit_network(std::span<const DiffPair> pairs, const NetworkConfig& config,
                           std::uint64_t seed);

// ---------------------------------------------------------------------------
// GA feature-difference weights.

struct GaConfig {
  int population = 50;
  int generations = 100;
  double crossover_rate = 0.8;
  double mutation_rate = 0.1;
  double range = 5.0;
  int tournament = 3;
};

struct GaWeights {
  std::vector<double> alpha;
  double fitness = 0.0;
  /// Best fitness after initialization and after each generation.
  std::vector<double> history;
};

/// Within-training leave-one-out MAE of the GA-weighted adjustment with k
/// analogies, for a given weight vector.
class GaObjective {
 public:
  GaObjective(const Dataset& train, std::size_t k);
  GaObjective(const Dataset& train, std::span<const Neighborhood> self_neighborhoods,
              std::size_t k);

  double operator()(std::span<const double> alpha) const;
  std::size_t dimension() const { return dimension_; }

 private:
  void build(const Dataset& train, std::span<const Neighborhood> self_neighborhoods,
             std::size_t k);

  std::size_t dimension_ = 0;
  // Per training project: actual minus mean analogy effort, and the mean
  // analogy feature difference.
  std::vector<double> residual_;
  std::vector<std::vector<double>> mean_diff_;
};

GaWeights fit_ga_weights(const Dataset& train, std::size_t k, const GaConfig& config,
                         std::uint64_t seed);
GaWeights fit_ga_weights(const GaObjective& objective, const GaConfig& config,
                         std::uint64_t seed);

ModelTreeConfig tree_config(const LearnerConfig& c);
NetworkConfig network_config(const LearnerConfig& c);
GaConfig ga_config(const LearnerConfig& c);

}  // namespace ebae
