#include "ebae/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "ebae/error.hpp"

namespace ebae {

std::vector<DiffPair> build_diff_pairs(const Dataset& train) {
  if (train.size() < 2) throw std::invalid_argument("build_diff_pairs: need >= 2 projects");
  const CaseBase base(train);
  const auto neighborhoods = base.self_neighborhoods(1);
  return build_diff_pairs(train, neighborhoods);
}

std::vector<DiffPair> build_diff_pairs(const Dataset& train,
                                       std::span<const Neighborhood> neighborhoods) {
  if (neighborhoods.size() != train.size()) {
    throw std::invalid_argument("build_diff_pairs: one neighborhood per project expected");
  }
  std::vector<DiffPair> pairs;
  pairs.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto& nearest = train.project(neighborhoods[i].analogies.at(0).index);
    const auto& self = train.project(i);
    pairs.push_back({feature_difference(self, nearest, train.features()),
                     self.effort - nearest.effort});
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Model tree

namespace {

struct LeafModel {
  double intercept = 0.0;
  std::vector<double> coefficients;
  double sse = 0.0;
};

LeafModel fit_leaf(std::span<const DiffPair> pairs, std::span<const std::size_t> rows,
                   std::size_t inputs) {
  const auto n = rows.size();
  LeafModel model;
  model.coefficients.assign(inputs, 0.0);
  double mean = 0.0;
  for (auto r : rows) mean += pairs[r].effort_diff;
  mean /= static_cast<double>(n);
  model.intercept = mean;
  for (auto r : rows) {
    const double e = pairs[r].effort_diff - mean;
    model.sse += e * e;
  }

  // Only columns that vary inside the leaf can carry a coefficient.
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < inputs; ++j) {
    const double first = pairs[rows.front()].feature_diff[j];
    for (auto r : rows) {
      if (pairs[r].feature_diff[j] != first) {
        cols.push_back(j);
        break;
      }
    }
  }
  const auto p = cols.size() + 1;
  if (cols.empty() || n <= p) return model;

  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pair = pairs[rows[i]];
    const auto ii = static_cast<Eigen::Index>(i);
    design(ii, 0) = 1.0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      design(ii, static_cast<Eigen::Index>(c + 1)) = pair.feature_diff[cols[c]];
    }
    y(ii) = pair.effort_diff;
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < static_cast<Eigen::Index>(p)) return model;
  const Eigen::VectorXd beta = qr.solve(y);
  if (!beta.allFinite()) return model;
  const double sse = (design * beta - y).squaredNorm();
  if (!(sse <= model.sse)) return model;

  model.intercept = beta(0);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    model.coefficients[cols[c]] = beta(static_cast<Eigen::Index>(c + 1));
  }
  model.sse = sse;
  return model;
}

class TreeBuilder {
 public:
  TreeBuilder(std::span<const DiffPair> pairs, const ModelTreeConfig& config)
      : pairs_(pairs), config_(config), inputs_(pairs.front().feature_diff.size()) {}

  std::vector<ModelTree::Node> build() {
    std::vector<std::size_t> rows(pairs_.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    grow(rows, 0);
    return std::move(nodes_);
  }

 private:
  int grow(std::vector<std::size_t>& rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_[id].samples = rows.size();
    nodes_[id].depth = depth;

    const LeafModel leaf = fit_leaf(pairs_, rows, inputs_);
    double total = 0.0;
    for (auto r : rows) total += pairs_[r].effort_diff * pairs_[r].effort_diff;
    const double tolerance = 1e-12 * (1.0 + total);

    const auto min_leaf = static_cast<std::size_t>(config_.min_leaf);
    const bool can_split = depth < config_.max_depth && rows.size() >= 2 * min_leaf &&
                           leaf.sse > tolerance;
    if (can_split) {
      if (const auto split = best_split(rows, min_leaf); split.feature >= 0) {
        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto r : rows) {
          (pairs_[r].feature_diff[static_cast<std::size_t>(split.feature)] <= split.threshold
               ? left
               : right)
              .push_back(r);
        }
        if (split.reduction > tolerance && left.size() >= min_leaf && right.size() >= min_leaf) {
          nodes_[id].feature = split.feature;
          nodes_[id].threshold = split.threshold;
          const int l = grow(left, depth + 1);
          const int r = grow(right, depth + 1);
          nodes_[id].left = l;
          nodes_[id].right = r;
          return id;
        }
      }
    }
    nodes_[id].intercept = leaf.intercept;
    nodes_[id].coefficients = leaf.coefficients;
    return id;
  }

  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double reduction = 0.0;
  };

  Split best_split(const std::vector<std::size_t>& rows, std::size_t min_leaf) const {
    const auto n = rows.size();
    double sum = 0.0;
    double sq = 0.0;
    for (auto r : rows) {
      sum += pairs_[r].effort_diff;
      sq += pairs_[r].effort_diff * pairs_[r].effort_diff;
    }
    const double parent_sse = sq - sum * sum / static_cast<double>(n);

    Split best;
    std::vector<std::size_t> order(rows);
    for (std::size_t j = 0; j < inputs_; ++j) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pairs_[a].feature_diff[j] < pairs_[b].feature_diff[j];
      });
      double left_sum = 0.0;
      double left_sq = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const double y = pairs_[order[i]].effort_diff;
        left_sum += y;
        left_sq += y * y;
        const std::size_t nl = i + 1;
        const std::size_t nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double x_here = pairs_[order[i]].feature_diff[j];
        const double x_next = pairs_[order[i + 1]].feature_diff[j];
        if (!(x_here < x_next)) continue;
        const double right_sum = sum - left_sum;
        const double right_sq = sq - left_sq;
        const double sse = (left_sq - left_sum * left_sum / static_cast<double>(nl)) +
                           (right_sq - right_sum * right_sum / static_cast<double>(nr));
        const double reduction = parent_sse - sse;
        if (reduction > best.reduction) {
          double threshold = 0.5 * (x_here + x_next);
          if (!(threshold < x_next)) threshold = x_here;
          best = {static_cast<int>(j), threshold, reduction};
        }
      }
    }
    return best;
  }

  std::span<const DiffPair> pairs_;
  ModelTreeConfig config_;
  std::size_t inputs_;
  std::vector<ModelTree::Node> nodes_;
};

}  // namespace

ModelTree::ModelTree(std::vector<Node> nodes, std::size_t input_size)
    : nodes_(std::move(nodes)), input_size_(input_size) {
  if (nodes_.empty()) throw std::invalid_argument("ModelTree: no nodes");
}

ModelTree ModelTree::constant(double value, std::size_t input_size) {
  Node leaf;
  leaf.intercept = value;
  leaf.coefficients.assign(input_size, 0.0);
  return ModelTree({leaf}, input_size);
}

double ModelTree::predict(std::span<const double> x) const {
  if (x.size() != input_size_) throw std::invalid_argument("ModelTree::predict: size mismatch");
  const Node* node = &nodes_.front();
  while (!node->is_leaf()) {
    const auto f = static_cast<std::size_t>(node->feature);
    node = &nodes_[static_cast<std::size_t>(x[f] <= node->threshold ? node->left : node->right)];
  }
  double out = node->intercept;
  for (std::size_t j = 0; j < x.size(); ++j) out += node->coefficients[j] * x[j];
  return out;
}

std::size_t ModelTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

int ModelTree::depth() const {
  int d = 0;
  for (const auto& n : nodes_) d = std::max(d, n.depth);
  return d;
}

ModelTree fit_model_tree(std::span<const DiffPair> pairs, const ModelTreeConfig& config) {
  if (config.min_leaf < 1) throw std::invalid_argument("fit_model_tree: min_leaf must be >= 1");
  const auto needed = 2 * static_cast<std::size_t>(config.min_leaf);
  if (pairs.size() < needed) {
    throw FitFailure(
        fmt::format("model tree needs at least {} pairs, got {}", needed, pairs.size()));
  }
  const auto inputs = pairs.front().feature_diff.size();
  for (const auto& p : pairs) {
    if (p.feature_diff.size() != inputs) throw FitFailure("model tree: ragged feature diffs");
    if (!std::isfinite(p.effort_diff)) throw FitFailure("model tree: non-finite target");
  }
  TreeBuilder builder(pairs, config);
  return ModelTree(builder.build(), inputs);
}

double predict_model_tree(const ModelTree& tree, std::span<const double> feature_diff) {
  return tree.predict(feature_diff);
}

// ---------------------------------------------------------------------------
// Feed-forward network

FeedForwardNet::FeedForwardNet(std::size_t inputs, std::size_t hidden)
    : inputs_(inputs), hidden_(hidden), params_(hidden * inputs + 2 * hidden + 1, 0.0) {
  standardization_.input_mean.assign(inputs, 0.0);
  standardization_.input_scale.assign(inputs, 1.0);
}

void FeedForwardNet::set_standardization(Standardization s) {
  if (s.input_mean.size() != inputs_ || s.input_scale.size() != inputs_) {
    throw std::invalid_argument("FeedForwardNet: standardization size mismatch");
  }
  standardization_ = std::move(s);
}

double FeedForwardNet::forward(std::span<const double> x) const {
  const double* w1 = params_.data();
  const double* b1 = w1 + hidden_ * inputs_;
  const double* w2 = b1 + hidden_;
  const double b2 = w2[hidden_];
  double out = b2;
  for (std::size_t h = 0; h < hidden_; ++h) {
    double a = b1[h];
    for (std::size_t i = 0; i < inputs_; ++i) a += w1[h * inputs_ + i] * x[i];
    out += w2[h] * std::tanh(a);
  }
  return out;
}

double FeedForwardNet::predict(std::span<const double> feature_diff) const {
  if (feature_diff.size() != inputs_) {
    throw std::invalid_argument("FeedForwardNet::predict: size mismatch");
  }
  std::vector<double> x(inputs_);
  for (std::size_t i = 0; i < inputs_; ++i) {
    x[i] = (feature_diff[i] - standardization_.input_mean[i]) / standardization_.input_scale[i];
  }
  return forward(x) * standardization_.target_scale + standardization_.target_mean;
}

double FeedForwardNet::loss(std::span<const std::vector<double>> inputs,
                            std::span<const double> targets) const {
  double sum = 0.0;
  for (std::size_t p = 0; p < inputs.size(); ++p) {
    const double e = forward(inputs[p]) - targets[p];
    sum += e * e;
  }
  return sum / static_cast<double>(inputs.size());
}

double FeedForwardNet::loss_and_gradient(std::span<const std::vector<double>> inputs,
                                         std::span<const double> targets,
                                         std::vector<double>& gradient) const {
  gradient.assign(params_.size(), 0.0);
  const double* w1 = params_.data();
  const double* b1 = w1 + hidden_ * inputs_;
  const double* w2 = b1 + hidden_;
  const double b2 = w2[hidden_];
  double* gw1 = gradient.data();
  double* gb1 = gw1 + hidden_ * inputs_;
  double* gw2 = gb1 + hidden_;
  double& gb2 = gw2[hidden_];

  const auto n = static_cast<double>(inputs.size());
  std::vector<double> act(hidden_);
  double sum = 0.0;
  for (std::size_t p = 0; p < inputs.size(); ++p) {
    const auto& x = inputs[p];
    double out = b2;
    for (std::size_t h = 0; h < hidden_; ++h) {
      double a = b1[h];
      for (std::size_t i = 0; i < inputs_; ++i) a += w1[h * inputs_ + i] * x[i];
      act[h] = std::tanh(a);
      out += w2[h] * act[h];
    }
    const double err = out - targets[p];
    sum += err * err;
    const double g = 2.0 * err / n;
    gb2 += g;
    for (std::size_t h = 0; h < hidden_; ++h) {
      gw2[h] += g * act[h];
      const double back = g * w2[h] * (1.0 - act[h] * act[h]);
      gb1[h] += back;
      for (std::size_t i = 0; i < inputs_; ++i) gw1[h * inputs_ + i] += back * x[i];
    }
  }
  return sum / n;
}

FeedForwardNet fit_network(std::span<const DiffPair> pairs, const NetworkConfig& config,
                           std::uint64_t seed) {
  if (pairs.size() < 4) {
    throw FitFailure(fmt::format("network needs at least 4 pairs, got {}", pairs.size()));
  }
  if (config.hidden < 1) throw std::invalid_argument("fit_network: hidden must be >= 1");
  const auto m = pairs.front().feature_diff.size();
  const auto n = static_cast<double>(pairs.size());

  FeedForwardNet::Standardization s;
  s.input_mean.assign(m, 0.0);
  s.input_scale.assign(m, 1.0);
  for (const auto& p : pairs) {
    if (p.feature_diff.size() != m) throw FitFailure("network: ragged feature diffs");
    for (std::size_t i = 0; i < m; ++i) s.input_mean[i] += p.feature_diff[i] / n;
    s.target_mean += p.effort_diff / n;
  }
  std::vector<double> var(m, 0.0);
  double target_var = 0.0;
  for (const auto& p : pairs) {
    for (std::size_t i = 0; i < m; ++i) {
      const double d = p.feature_diff[i] - s.input_mean[i];
      var[i] += d * d / n;
    }
    const double d = p.effort_diff - s.target_mean;
    target_var += d * d / n;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (var[i] > 0.0) s.input_scale[i] = std::sqrt(var[i]);
  }
  if (target_var > 0.0) s.target_scale = std::sqrt(target_var);

  std::vector<std::vector<double>> x;
  std::vector<double> y;
  x.reserve(pairs.size());
  y.reserve(pairs.size());
  for (const auto& p : pairs) {
    std::vector<double> row(m);
    for (std::size_t i = 0; i < m; ++i) {
      row[i] = (p.feature_diff[i] - s.input_mean[i]) / s.input_scale[i];
    }
    x.push_back(std::move(row));
    y.push_back((p.effort_diff - s.target_mean) / s.target_scale);
  }

  FeedForwardNet net(m, static_cast<std::size_t>(config.hidden));
  net.set_standardization(std::move(s));
  std::mt19937_64 rng(seed);
  const double limit = m > 0 ? 1.0 / std::sqrt(static_cast<double>(m)) : 1.0;
  std::uniform_real_distribution<double> init(-limit, limit);
  auto params = net.parameters();
  const std::size_t w1_count = net.hidden() * m;
  for (std::size_t i = 0; i < w1_count; ++i) params[i] = init(rng);

  std::vector<double> gradient;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double l = net.loss_and_gradient(x, y, gradient);
    if (!std::isfinite(l)) throw FitFailure("network training diverged (non-finite loss)");
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= config.learning_rate * gradient[i];
  }
  const double final_loss = net.loss(x, y);
  if (!std::isfinite(final_loss)) throw FitFailure("network training diverged (non-finite loss)");
  for (double p : params) {
    if (!std::isfinite(p)) throw FitFailure("network training produced non-finite weights");
  }
  return net;
}

// ---------------------------------------------------------------------------
// GA weights

GaObjective::GaObjective(const Dataset& train, std::size_t k) {
  if (k == 0 || train.size() < k + 2) {
    throw std::invalid_argument("GaObjective: training set needs at least k+2 projects");
  }
  const CaseBase base(train);
  const auto neighborhoods = base.self_neighborhoods(k);
  build(train, neighborhoods, k);
}

GaObjective::GaObjective(const Dataset& train, std::span<const Neighborhood> self_neighborhoods,
                         std::size_t k) {
  build(train, self_neighborhoods, k);
}

void GaObjective::build(const Dataset& train, std::span<const Neighborhood> neighborhoods,
                        std::size_t k) {
  if (neighborhoods.size() != train.size()) {
    throw std::invalid_argument("GaObjective: one neighborhood per project expected");
  }
  dimension_ = train.feature_count();
  residual_.reserve(train.size());
  mean_diff_.reserve(train.size());
  for (std::size_t p = 0; p < train.size(); ++p) {
    const auto& self = train.project(p);
    const auto& nbh = neighborhoods[p];
    if (nbh.k() < k) throw std::invalid_argument("GaObjective: neighborhood shorter than k");
    double mean_effort = 0.0;
    std::vector<double> diff(dimension_, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      const auto& other = train.project(nbh.analogies[i].index);
      mean_effort += other.effort;
      const auto d = feature_difference(self, other, train.features());
      for (std::size_t j = 0; j < dimension_; ++j) diff[j] += d[j];
    }
    const auto kk = static_cast<double>(k);
    for (auto& d : diff) d /= kk;
    residual_.push_back(self.effort - mean_effort / kk);
    mean_diff_.push_back(std::move(diff));
  }
}

double GaObjective::operator()(std::span<const double> alpha) const {
  if (alpha.size() != dimension_) throw std::invalid_argument("GaObjective: dimension mismatch");
  double sum = 0.0;
  for (std::size_t p = 0; p < residual_.size(); ++p) {
    double correction = 0.0;
    for (std::size_t j = 0; j < dimension_; ++j) correction += alpha[j] * mean_diff_[p][j];
    sum += std::abs(residual_[p] - correction);
  }
  return sum / static_cast<double>(residual_.size());
}

GaWeights fit_ga_weights(const Dataset& train, std::size_t k, const GaConfig& config,
                         std::uint64_t seed) {
  const GaObjective objective(train, k);
  return fit_ga_weights(objective, config, seed);
}

GaWeights fit_ga_weights(const GaObjective& objective, const GaConfig& config,
                         std::uint64_t seed) {
  if (config.population < 2) throw std::invalid_argument("GA: population must be >= 2");
  const auto m = objective.dimension();
  const auto pop_size = static_cast<std::size_t>(config.population);
  const double range = config.range;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> gene(-range, range);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, 0.1 * range);
  std::uniform_int_distribution<std::size_t> pick(0, pop_size - 1);

  std::vector<std::vector<double>> pop(pop_size, std::vector<double>(m, 0.0));
  for (std::size_t i = 1; i < pop_size; ++i) {
    for (auto& g : pop[i]) g = gene(rng);
  }
  std::vector<double> fit(pop_size);
  for (std::size_t i = 0; i < pop_size; ++i) fit[i] = objective(pop[i]);

  const auto best_of = [&]() {
    return static_cast<std::size_t>(std::min_element(fit.begin(), fit.end()) - fit.begin());
  };
  GaWeights result;
  result.history.push_back(fit[best_of()]);

  const auto tournament = [&]() {
    std::size_t winner = pick(rng);
    for (int t = 1; t < config.tournament; ++t) {
      const auto challenger = pick(rng);
      if (fit[challenger] < fit[winner]) winner = challenger;
    }
    return winner;
  };

  std::vector<std::vector<double>> next(pop_size);
  std::vector<double> next_fit(pop_size);
  for (int gen = 0; gen < config.generations; ++gen) {
    const auto elite = best_of();
    next[0] = pop[elite];
    next_fit[0] = fit[elite];
    for (std::size_t i = 1; i < pop_size; ++i) {
      const auto& a = pop[tournament()];
      const auto& b = pop[tournament()];
      std::vector<double> child = a;
      if (unit(rng) < config.crossover_rate) {
        const double w = unit(rng);
        for (std::size_t j = 0; j < m; ++j) child[j] = w * a[j] + (1.0 - w) * b[j];
      }
      for (auto& g : child) {
        if (unit(rng) < config.mutation_rate) g = std::clamp(g + jitter(rng), -range, range);
      }
      next_fit[i] = objective(child);
      next[i] = std::move(child);
    }
    std::swap(pop, next);
    std::swap(fit, next_fit);
    result.history.push_back(fit[best_of()]);
  }
  const auto best = best_of();
  result.alpha = pop[best];
  result.fitness = fit[best];
  return result;
}

ModelTreeConfig tree_config(const LearnerConfig& c) { return {c.mt_min_leaf, c.mt_max_depth}; }

NetworkConfig network_config(const LearnerConfig& c) {
  return {c.nn_hidden, c.nn_epochs, c.nn_lr};
}

GaConfig ga_config(const LearnerConfig& c) {
  GaConfig g;
  g.population = c.ga_pop;
  g.generations = c.ga_gens;
  g.crossover_rate = c.ga_cx;
  g.mutation_rate = c.ga_mut;
  g.range = c.ga_range;
  return g;
}

}  // namespace ebae
