#include "ebae/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "ebae/data.hpp"
#include "ebae/error.hpp"

namespace ebae {

PointwiseErrors pointwise_errors(double actual, double predicted, double floor) {
  if (!(actual > 0.0)) throw std::invalid_argument("pointwise_errors: actual must be positive");
  if (!(floor > 0.0)) throw std::invalid_argument("pointwise_errors: floor must be positive");
  PointwiseErrors e;
  e.ae = std::abs(actual - predicted);
  e.mre = e.ae / actual;
  e.log_residual = std::log(actual) - std::log(std::max(predicted, floor));
  return e;
}

double log_floor(std::span<const double> efforts) {
  if (efforts.empty()) throw std::invalid_argument("log_floor: no efforts");
  return 1e-6 * median({efforts.begin(), efforts.end()});
}

void PredictionTable::add(std::string id, double actual, double predicted) {
  const auto e = pointwise_errors(actual, predicted, floor);
  rows.push_back({std::move(id), actual, predicted, e.ae, e.mre, e.log_residual});
}

std::vector<double> PredictionTable::absolute_errors() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.ae);
  return out;
}

std::vector<double> PredictionTable::predictions() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.predicted);
  return out;
}

namespace {

void require_rows(const PredictionTable& t) {
  if (t.rows.empty()) throw std::invalid_argument("empty prediction table");
}

}  // namespace

double mae(const PredictionTable& t) {
  require_rows(t);
  double s = 0.0;
  for (const auto& r : t.rows) s += r.ae;
  return s / static_cast<double>(t.size());
}

double mmre(const PredictionTable& t) {
  require_rows(t);
  double s = 0.0;
  for (const auto& r : t.rows) s += r.mre;
  return s / static_cast<double>(t.size());
}

double pred25(const PredictionTable& t) {
  require_rows(t);
  const auto hits = std::count_if(t.rows.begin(), t.rows.end(),
                                  [](const PredictionRow& r) { return r.mre <= 0.25; });
  return 100.0 * static_cast<double>(hits) / static_cast<double>(t.size());
}

double log_residual_variance(std::span<const double> l) {
  if (l.size() < 2) throw std::invalid_argument("log residual variance needs n >= 2");
  double mean = 0.0;
  for (double v : l) mean += v;
  mean /= static_cast<double>(l.size());
  double ss = 0.0;
  for (double v : l) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(l.size() - 1);
}

double lsd(std::span<const double> l) {
  if (l.size() < 2) throw std::invalid_argument("lsd needs n >= 2");
  const double s2 = log_residual_variance(l);
  double ss = 0.0;
  for (double v : l) ss += (v + 0.5 * s2) * (v + 0.5 * s2);
  return std::sqrt(ss / static_cast<double>(l.size() - 1));
}

double lsd(const PredictionTable& t) {
  std::vector<double> l;
  l.reserve(t.size());
  for (const auto& r : t.rows) l.push_back(r.log_residual);
  return lsd(l);
}

BalancedErrors mbre_mibre(const PredictionTable& t) {
  require_rows(t);
  BalancedErrors b;
  for (const auto& r : t.rows) {
    const double p = std::max(r.predicted, t.floor);
    const double ae = std::abs(r.actual - p);
    b.mbre += ae / std::min(r.actual, p);
    b.mibre += ae / std::max(r.actual, p);
  }
  b.mbre /= static_cast<double>(t.size());
  b.mibre /= static_cast<double>(t.size());
  return b;
}

double exact_random_guess_mae(std::span<const double> e) {
  const auto n = e.size();
  if (n < 2) throw std::invalid_argument("random guess baseline needs n >= 2");
  double total = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    double row = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      if (r != t) row += std::abs(e[t] - e[r]);
    }
    total += row / static_cast<double>(n - 1);
  }
  return total / static_cast<double>(n);
}

double quantile(std::vector<double> v, double p) {
  if (v.empty()) throw std::invalid_argument("quantile of empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p outside [0,1]");
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

BaselineStats baseline(std::span<const double> e, int runs, std::uint64_t seed) {
  const auto n = e.size();
  if (n < 3) throw std::invalid_argument("baseline needs at least 3 efforts");
  if (runs < 2) throw std::invalid_argument("baseline needs at least 2 runs");
  BaselineStats b;
  b.runs = runs;
  b.seed = seed;
  b.mae_p0 = exact_random_guess_mae(e);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 2);
  std::vector<double> run_mae(static_cast<std::size_t>(runs));
  for (auto& m : run_mae) {
    double s = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      std::size_t r = pick(rng);
      if (r >= t) ++r;
      s += std::abs(e[t] - e[r]);
    }
    m = s / static_cast<double>(n);
  }
  double mean = 0.0;
  for (double m : run_mae) mean += m;
  mean /= static_cast<double>(runs);
  double ss = 0.0;
  for (double m : run_mae) ss += (m - mean) * (m - mean);
  b.mean_run_mae = mean;
  b.sp0 = std::sqrt(ss / static_cast<double>(runs - 1));
  b.sa5 = b.defined() ? 1.0 - quantile(run_mae, 0.05) / b.mae_p0 : std::nan("");
  return b;
}

double standardized_accuracy(double mae, const BaselineStats& b) {
  if (!b.defined()) throw DegenerateInput("SA undefined: random-guess MAE is zero");
  return 1.0 - mae / b.mae_p0;
}

double effect_size(double mae, const BaselineStats& b) {
  if (!(b.sp0 > 0.0)) throw DegenerateInput("effect size undefined: SP0 is zero");
  return (b.mae_p0 - mae) / b.sp0;
}

EvalSummary summarize(const PredictionTable& t, const BaselineStats& b) {
  EvalSummary s;
  s.label = t.label;
  s.mae = mae(t);
  s.mmre = mmre(t);
  s.pred25 = pred25(t);
  std::vector<double> l;
  for (const auto& r : t.rows) l.push_back(r.log_residual);
  s.s2 = log_residual_variance(l);
  s.lsd = lsd(l);
  const auto be = mbre_mibre(t);
  s.mbre = be.mbre;
  s.mibre = be.mibre;
  s.sa = standardized_accuracy(s.mae, b);
  s.delta = effect_size(s.mae, b);
  s.fallback_count = t.fallback_count;
  s.baseline = b;
  return s;
}

}  // namespace ebae
