#pragma once

// Independent reference implementations shared by unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ebae/analogy.hpp"
#include "ebae/stats.hpp"
#include "support.hpp"

namespace ebae::test {

inline std::vector<Group> normal_groups(const std::vector<double>& means, double sd, std::size_t n,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Group> groups;
  for (std::size_t g = 0; g < means.size(); ++g) {
    std::normal_distribution<double> d(means[g], sd);
    Group gr;
    gr.label = std::string(1, static_cast<char>('A' + g));
    for (std::size_t i = 0; i < n; ++i) gr.values.push_back(d(rng));
    groups.push_back(std::move(gr));
  }
  return groups;
}

// Exhaustive oracle: at every level try every contiguous binary split with
// B0 written as the weighted squared deviation of the two part means.
inline void oracle_partition(const std::vector<double>& m, std::size_t lo, std::size_t hi,
                      double mev, double df, double alpha, std::vector<std::size_t>& out) {
  const std::size_t g = hi - lo;
  if (g < 2) {
    out.push_back(g);
    return;
  }
  double grand = 0;
  for (std::size_t i = lo; i < hi; ++i) grand += m[i] / static_cast<double>(g);
  double best = -1;
  std::size_t cut = lo + 1;
  for (std::size_t c = lo + 1; c < hi; ++c) {
    double a = 0, b = 0;
    for (std::size_t i = lo; i < c; ++i) a += m[i];
    for (std::size_t i = c; i < hi; ++i) b += m[i];
    const double na = static_cast<double>(c - lo);
    const double nb = static_cast<double>(hi - c);
    a /= na;
    b /= nb;
    const double b0 = na * (a - grand) * (a - grand) + nb * (b - grand) * (b - grand);
    if (b0 > best * (1 + 1e-12) + 1e-300) {
      best = b0;
      cut = c;
    }
  }
  double ss = 0;
  for (std::size_t i = lo; i < hi; ++i) ss += (m[i] - grand) * (m[i] - grand);
  const double sigma2 = (ss + df * mev) / (static_cast<double>(g) + df);
  const double pi = std::numbers::pi;
  const double lambda = pi / (2 * (pi - 2)) * best / sigma2;
  if (!(lambda > chi_squared_critical(static_cast<double>(g) / (pi - 2), alpha))) {
    out.push_back(g);
    return;
  }
  oracle_partition(m, lo, cut, mev, df, alpha, out);
  oracle_partition(m, cut, hi, mev, df, alpha, out);
}

struct Pooled {
  std::vector<double> sorted_means;
  double mse = 0;
  double df = 0;
  double r = 0;
};

inline Pooled pool(const std::vector<Group>& groups) {
  Pooled p;
  double within = 0, inv = 0;
  std::size_t total = 0;
  for (const auto& g : groups) {
    const double n = static_cast<double>(g.values.size());
    const double m = std::accumulate(g.values.begin(), g.values.end(), 0.0) / n;
    for (double v : g.values) within += (v - m) * (v - m);
    p.sorted_means.push_back(m);
    total += g.values.size();
    inv += 1 / n;
  }
  std::sort(p.sorted_means.begin(), p.sorted_means.end());
  p.df = static_cast<double>(total - groups.size());
  p.mse = within / p.df;
  p.r = static_cast<double>(groups.size()) / inv;
  return p;
}

inline std::vector<std::size_t> sizes_of(const ScottKnottResult& r) {
  std::vector<std::size_t> s;
  for (const auto& c : r.clusters) s.push_back(c.members.size());
  return s;
}

// effort = 2*size + 100, so every analogy pair differs by exactly 2*size diff.
inline Dataset planted() {
  std::vector<std::pair<double, double>> rows;
  const double sizes[] = {1, 2.5, 3, 4.2, 6, 7.7, 9, 10, 12.5, 13, 15, 18};
  for (double s : sizes) rows.emplace_back(s, 2 * s + 100);
  return test::sized(rows);
}

// Leave-self-out MAE of the weighted adjustment, recomputed from scratch.
inline double loo_mae(const Dataset& train, std::size_t k, double alpha) {
  double sum = 0;
  for (std::size_t t = 0; t < train.size(); ++t) {
    const auto nbh = CaseBase(train).retrieve(train.project(t), k, t);
    double pred = 0;
    for (const auto& a : nbh.analogies) {
      const auto& o = train.project(a.index);
      pred += o.effort + alpha * (train.project(t).features[0] - o.features[0]);
    }
    sum += std::abs(train.project(t).effort - pred / static_cast<double>(k));
  }
  return sum / static_cast<double>(train.size());
}

}  // namespace ebae::test
