#include "ebae/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

#include "ebae/error.hpp"

namespace ebae {

double box_cox_value(double x, double lambda) {
  if (!(x > 0.0)) throw std::invalid_argument("box_cox_value: input must be positive");
  if (lambda == 0.0) return std::log(x);
  return (std::pow(x, lambda) - 1.0) / lambda;
}

std::vector<double> apply_box_cox(std::span<const double> values, const TransformSpec& spec) {
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(box_cox_value(v + spec.shift, spec.lambda));
  return out;
}

double box_cox_log_likelihood(std::span<const double> x, double lambda) {
  if (x.empty()) throw std::invalid_argument("box_cox_log_likelihood: empty input");
  const auto n = static_cast<double>(x.size());
  double log_sum = 0.0;
  double mean = 0.0;
  std::vector<double> y;
  y.reserve(x.size());
  for (double v : x) {
    y.push_back(box_cox_value(v, lambda));
    log_sum += std::log(v);
    mean += y.back();
  }
  mean /= n;
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  return -0.5 * n * std::log(ss / n) + (lambda - 1.0) * log_sum;
}

TransformSpec fit_box_cox(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("box_cox: empty input");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  TransformSpec spec;
  if (*lo <= 0.0) spec.shift = (*hi > 0.0 ? 1e-3 * *hi : 1.0) - *lo;
  if (*lo == *hi) return spec;

  std::vector<double> x;
  x.reserve(values.size());
  for (double v : values) x.push_back(v + spec.shift);
  double best = -std::numeric_limits<double>::infinity();
  for (int i = -200; i <= 200; ++i) {
    const double lambda = i / 100.0;
    const double ll = box_cox_log_likelihood(x, lambda);
    if (ll > best) {
      best = ll;
      spec.lambda = lambda;
    }
  }
  return spec;
}

BoxCoxResult box_cox(std::span<const double> values) {
  BoxCoxResult r;
  r.spec = fit_box_cox(values);
  r.values = apply_box_cox(values, r.spec);
  return r;
}

namespace {

constexpr std::array<double, 5> kAlphas = {0.20, 0.15, 0.10, 0.05, 0.01};

struct LillieforsRow {
  std::size_t n;
  std::array<double, 5> c;
};

constexpr std::array<LillieforsRow, 19> kLilliefors = {{
    {4, {.300, .319, .352, .381, .417}},  {5, {.285, .299, .315, .337, .405}},
    {6, {.265, .277, .294, .319, .364}},  {7, {.247, .258, .276, .300, .348}},
    {8, {.233, .244, .261, .285, .331}},  {9, {.223, .233, .249, .271, .311}},
    {10, {.215, .224, .239, .258, .294}}, {11, {.206, .217, .230, .249, .284}},
    {12, {.199, .212, .223, .242, .275}}, {13, {.190, .202, .214, .234, .268}},
    {14, {.183, .194, .207, .227, .261}}, {15, {.177, .187, .201, .220, .257}},
    {16, {.173, .182, .195, .213, .250}}, {17, {.169, .177, .189, .206, .245}},
    {18, {.166, .173, .184, .200, .239}}, {19, {.163, .169, .179, .195, .235}},
    {20, {.160, .166, .174, .190, .231}}, {25, {.142, .147, .158, .173, .200}},
    {30, {.131, .136, .144, .161, .187}},
}};

constexpr std::array<double, 5> kLillieforsLarge = {.736, .768, .805, .886, 1.031};

}  // namespace

double lilliefors_critical(std::size_t n, double alpha) {
  std::size_t col = kAlphas.size();
  for (std::size_t i = 0; i < kAlphas.size(); ++i) {
    if (std::abs(alpha - kAlphas[i]) < 1e-12) col = i;
  }
  if (col == kAlphas.size()) {
    throw std::invalid_argument("lilliefors_critical: alpha must be 0.20, 0.15, 0.10, 0.05 or 0.01");
  }
  if (n < 4) throw std::invalid_argument("lilliefors_critical: n must be >= 4");
  if (n > 30) return kLillieforsLarge[col] / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < kLilliefors.size(); ++i) {
    if (kLilliefors[i].n == n) return kLilliefors[i].c[col];
    if (kLilliefors[i].n > n) {
      const auto& a = kLilliefors[i - 1];
      const auto& b = kLilliefors[i];
      const double t = static_cast<double>(n - a.n) / static_cast<double>(b.n - a.n);
      return a.c[col] + t * (b.c[col] - a.c[col]);
    }
  }
  return kLilliefors.back().c[col];
}

KsResult ks_normality(std::span<const double> values, double alpha) {
  const auto n = values.size();
  if (n < 5) throw std::invalid_argument("ks_normality: need at least 5 observations");
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  const double nn = static_cast<double>(n);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / nn;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (nn - 1.0));
  if (!(sd > 0.0)) throw DegenerateInput("ks_normality: constant sample");

  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = 0.5 * std::erfc(-(x[i] - mean) / (sd * std::numbers::sqrt2));
    const double above = static_cast<double>(i + 1) / nn - f;
    const double below = f - static_cast<double>(i) / nn;
    d = std::max({d, above, below});
  }
  KsResult r;
  r.statistic = d;
  r.critical = lilliefors_critical(n, alpha);
  r.reject = d > r.critical;
  return r;
}

double chi_squared_critical(double df, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  const boost::math::chi_squared dist(df);
  return boost::math::quantile(boost::math::complement(dist, alpha));
}

SplitTest scott_knott_split(std::span<const double> m, double mean_error_variance,
                            double error_df, double alpha) {
  const auto g = m.size();
  SplitTest best;
  if (g < 2) return best;
  const double total = std::accumulate(m.begin(), m.end(), 0.0);
  const double gg = static_cast<double>(g);
  double left = 0.0;
  best.b0 = -1.0;
  for (std::size_t l = 1; l < g; ++l) {
    left += m[l - 1];
    const double right = total - left;
    const double b = left * left / static_cast<double>(l) +
                     right * right / static_cast<double>(g - l) - total * total / gg;
    if (b > best.b0) {
      best.b0 = b;
      best.left_size = l;
    }
  }
  best.b0 = std::max(best.b0, 0.0);

  const double grand = total / gg;
  double ss = 0.0;
  for (double v : m) ss += (v - grand) * (v - grand);
  const double sigma2 = (ss + error_df * mean_error_variance) / (gg + error_df);
  const double pi = std::numbers::pi;
  best.critical = chi_squared_critical(gg / (pi - 2.0), alpha);
  if (sigma2 > 0.0) {
    best.lambda = pi / (2.0 * (pi - 2.0)) * best.b0 / sigma2;
  } else {
    best.lambda = best.b0 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  best.significant = best.lambda > best.critical;
  return best;
}

namespace {

void partition_into(std::span<const double> m, double mev, double df, double alpha,
                    std::vector<std::size_t>& out) {
  if (m.size() < 2) {
    out.push_back(m.size());
    return;
  }
  const auto split = scott_knott_split(m, mev, df, alpha);
  if (!split.significant) {
    out.push_back(m.size());
    return;
  }
  partition_into(m.first(split.left_size), mev, df, alpha, out);
  partition_into(m.subspan(split.left_size), mev, df, alpha, out);
}

ScottKnottResult assemble(std::vector<std::string> labels, std::vector<double> means,
                          double mse, double df, double r, double alpha) {
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return means[a] < means[b]; });
  std::vector<double> sorted;
  for (auto i : order) sorted.push_back(means[i]);

  ScottKnottResult result;
  result.alpha = alpha;
  result.error_variance = mse;
  result.error_df = df;
  const auto sizes = scott_knott_partition(sorted, mse / r, df, alpha);
  std::size_t pos = 0;
  for (auto size : sizes) {
    ScottKnottCluster c;
    double sum = 0.0;
    for (std::size_t i = 0; i < size; ++i, ++pos) {
      c.members.push_back(labels[order[pos]]);
      c.means.push_back(sorted[pos]);
      sum += sorted[pos];
    }
    c.mean = sum / static_cast<double>(size);
    result.clusters.push_back(std::move(c));
  }
  return result;
}

}  // namespace

std::vector<std::size_t> scott_knott_partition(std::span<const double> sorted_means,
                                               double mean_error_variance, double error_df,
                                               double alpha) {
  if (!std::is_sorted(sorted_means.begin(), sorted_means.end())) {
    throw std::invalid_argument("scott_knott_partition: means must be sorted");
  }
  std::vector<std::size_t> out;
  partition_into(sorted_means, mean_error_variance, error_df, alpha, out);
  return out;
}

std::size_t ScottKnottResult::cluster_of(const std::string& label) const {
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const auto& m = clusters[c].members;
    if (std::find(m.begin(), m.end(), label) != m.end()) return c;
  }
  throw std::out_of_range("ScottKnottResult: unknown label " + label);
}

std::vector<std::string> ScottKnottResult::ordered_labels() const {
  std::vector<std::string> out;
  for (const auto& c : clusters) out.insert(out.end(), c.members.begin(), c.members.end());
  return out;
}

ScottKnottResult scott_knott(std::span<const Group> groups, double alpha) {
  if (groups.size() < 2) throw std::invalid_argument("scott_knott: need at least 2 groups");
  std::vector<std::string> labels;
  std::vector<double> means;
  double within = 0.0;
  std::size_t total = 0;
  double inv_sizes = 0.0;
  for (const auto& g : groups) {
    if (g.values.size() < 2) {
      throw std::invalid_argument("scott_knott: group '" + g.label + "' has fewer than 2 values");
    }
    const double n = static_cast<double>(g.values.size());
    const double mean = std::accumulate(g.values.begin(), g.values.end(), 0.0) / n;
    for (double v : g.values) within += (v - mean) * (v - mean);
    total += g.values.size();
    inv_sizes += 1.0 / n;
    labels.push_back(g.label);
    means.push_back(mean);
  }
  const double df = static_cast<double>(total - groups.size());
  const double r = static_cast<double>(groups.size()) / inv_sizes;
  return assemble(std::move(labels), std::move(means), within / df, df, r, alpha);
}

ScottKnottResult scott_knott_two_way(std::span<const Cell> cells, double alpha) {
  std::vector<std::string> labels;
  std::vector<double> sums;
  std::vector<std::size_t> counts;
  double within = 0.0;
  std::size_t total = 0;
  for (const auto& c : cells) {
    if (c.values.empty()) {
      throw std::invalid_argument("scott_knott_two_way: empty cell for " + c.treatment);
    }
    auto it = std::find(labels.begin(), labels.end(), c.treatment);
    std::size_t t = static_cast<std::size_t>(it - labels.begin());
    if (it == labels.end()) {
      labels.push_back(c.treatment);
      sums.push_back(0.0);
      counts.push_back(0);
    }
    const double n = static_cast<double>(c.values.size());
    const double mean = std::accumulate(c.values.begin(), c.values.end(), 0.0) / n;
    for (double v : c.values) {
      within += (v - mean) * (v - mean);
      sums[t] += v;
    }
    counts[t] += c.values.size();
    total += c.values.size();
  }
  if (labels.size() < 2) throw std::invalid_argument("scott_knott_two_way: need >= 2 treatments");
  if (total <= cells.size()) {
    throw std::invalid_argument("scott_knott_two_way: no residual degrees of freedom");
  }
  std::vector<double> means;
  double inv = 0.0;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    means.push_back(sums[t] / static_cast<double>(counts[t]));
    inv += 1.0 / static_cast<double>(counts[t]);
  }
  const double df = static_cast<double>(total - cells.size());
  const double r = static_cast<double>(labels.size()) / inv;
  return assemble(std::move(labels), std::move(means), within / df, df, r, alpha);
}

}  // namespace ebae
