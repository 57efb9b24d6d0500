#include "ebae/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "ebae/error.hpp"

namespace ebae {

std::vector<FilterVerdict> filter_actual_predictors(std::span<const EvalSummary> summaries,
                                                    double delta_threshold) {
  std::vector<FilterVerdict> out;
  out.reserve(summaries.size());
  for (const auto& s : summaries) {
    FilterVerdict v;
    v.label = s.label;
    const bool beats_sa5 = s.sa > s.baseline.sa5;
    const bool large_delta = s.delta > delta_threshold;
    v.kept = beats_sa5 && large_delta;
    if (!beats_sa5) v.reason = "SA <= SA5";
    if (!large_delta) {
      if (!v.reason.empty()) v.reason += "; ";
      v.reason += fmt::format("Delta <= {}", delta_threshold);
    }
    out.push_back(std::move(v));
  }
  return out;
}

ScottKnottResult cluster_tables(std::span<const PredictionTable> tables, double alpha) {
  std::vector<double> pooled;
  for (const auto& t : tables) {
    for (const auto& r : t.rows) pooled.push_back(r.ae);
  }
  const auto spec = fit_box_cox(pooled);
  std::vector<Group> groups;
  groups.reserve(tables.size());
  for (const auto& t : tables) groups.push_back({t.label, apply_box_cox(t.absolute_errors(), spec)});
  auto result = scott_knott(groups, alpha);
  result.transform = spec;
  return result;
}

BestCluster select_best_cluster(std::span<const PredictionTable> survivors, double alpha) {
  BestCluster best;
  if (survivors.empty()) return best;
  if (survivors.size() == 1) {
    best.members = {survivors.front().label};
    return best;
  }
  best.clustering = cluster_tables(survivors, alpha);
  best.members = best.clustering->clusters.front().members;
  return best;
}

RankingOutcome rank_summaries(std::span<const EvalSummary> summaries) {
  std::vector<std::string> labels;
  std::vector<std::pair<std::string, std::vector<double>>> measures = {
      {"MAE", {}}, {"LSD", {}}, {"MBRE", {}}, {"MIBRE", {}}};
  for (const auto& s : summaries) {
    labels.push_back(s.label);
    measures[0].second.push_back(s.mae);
    measures[1].second.push_back(s.lsd);
    measures[2].second.push_back(s.mbre);
    measures[3].second.push_back(s.mibre);
  }
  return borda_rank(profile_from_measures(std::move(labels), measures));
}

std::vector<std::string> borda_order(const RankingOutcome& outcome,
                                     std::span<const EvalSummary> summaries) {
  std::vector<std::string> out;
  for (const auto& tier : outcome.tiers) {
    std::vector<std::size_t> members = tier;
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      if (summaries[a].mae != summaries[b].mae) return summaries[a].mae < summaries[b].mae;
      return outcome.candidates[a] < outcome.candidates[b];
    });
    for (auto c : members) out.push_back(outcome.candidates[c]);
  }
  return out;
}

std::vector<EnsembleSpec> build_ensembles(std::span<const std::string> ranked) {
  std::vector<EnsembleSpec> out;
  for (std::size_t z = 2; z <= ranked.size(); ++z) {
    out.push_back({"Top" + std::to_string(z), {ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(z)}});
  }
  return out;
}

double predict_ensemble(std::span<const double> member_predictions) {
  if (member_predictions.empty()) throw std::invalid_argument("ensemble without members");
  double sum = 0.0;
  for (double p : member_predictions) sum += p;
  return sum / static_cast<double>(member_predictions.size());
}

double predict_ensemble(const EnsembleSpec& spec, FoldEstimator& fold) {
  std::vector<double> p;
  for (const auto& m : spec.members) {
    const auto v = parse_variant(m);
    if (!v) throw std::invalid_argument("unknown ensemble member " + m);
    p.push_back(fold.predict(*v).value);
  }
  return predict_ensemble(p);
}

PredictionTable ensemble_table(const EnsembleSpec& spec, std::span<const PredictionTable> tables) {
  std::vector<const PredictionTable*> members;
  for (const auto& m : spec.members) {
    const auto it = std::find_if(tables.begin(), tables.end(),
                                 [&](const PredictionTable& t) { return t.label == m; });
    if (it == tables.end()) throw std::invalid_argument("no prediction table for member " + m);
    members.push_back(&*it);
  }
  if (members.empty()) throw std::invalid_argument("ensemble without members");
  PredictionTable out;
  out.label = spec.id;
  out.floor = members.front()->floor;
  const auto n = members.front()->size();
  std::vector<double> p(members.size());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < members.size(); ++i) p[i] = members[i]->rows.at(r).predicted;
    const auto& row = members.front()->rows[r];
    out.add(row.id, row.actual, predict_ensemble(p));
  }
  return out;
}

const EvalSummary* PipelineReport::summary(const std::string& label) const {
  for (const auto* list : {&summaries, &ensemble_summaries}) {
    for (const auto& s : *list) {
      if (s.label == label) return &s;
    }
  }
  return nullptr;
}

namespace {

bool tabulated_alpha(double a) {
  for (double t : {0.20, 0.15, 0.10, 0.05, 0.01}) {
    if (std::abs(a - t) < 1e-12) return true;
  }
  return false;
}

std::optional<KsResult> try_ks(std::span<const double> values, double alpha) {
  if (values.size() < 5) return std::nullopt;
  try {
    return ks_normality(values, alpha);
  } catch (const DegenerateInput&) {
    return std::nullopt;
  }
}

void rank_singles_and_ensembles(PipelineReport& r) {
  if (r.joint_summaries.size() < 2) return;
  std::vector<PredictionTable> tables;
  for (const auto& s : r.joint_summaries) {
    const auto* pool = &r.tables;
    if (std::any_of(r.ensembles.begin(), r.ensembles.end(),
                    [&](const EnsembleSpec& e) { return e.id == s.label; })) {
      pool = &r.ensemble_tables;
    }
    for (const auto& t : *pool) {
      if (t.label == s.label) tables.push_back(t);
    }
  }
  try {
    r.joint_clustering = cluster_tables(tables, r.config.alpha);
  } catch (const std::exception& e) {
    r.notes.push_back(std::string("joint Scott-Knott skipped: ") + e.what());
  }
  r.joint = rank_summaries(r.joint_summaries);
  r.joint_order = borda_order(*r.joint, r.joint_summaries);

  double ens = 0.0;
  double single = 0.0;
  std::size_t n_ens = 0;
  std::size_t n_single = 0;
  for (std::size_t c = 0; c < r.joint->candidates.size(); ++c) {
    const bool is_ensemble = c >= r.ranked_best.size();
    (is_ensemble ? ens : single) += r.joint->rank[c];
    ++(is_ensemble ? n_ens : n_single);
  }
  if (n_ens > 0) r.average_ranks.ensembles = ens / static_cast<double>(n_ens);
  if (n_single > 0) r.average_ranks.singles = single / static_cast<double>(n_single);
}

void analyse_all_variants(PipelineReport& r, std::span<const VariantId> variants) {
  std::vector<double> pooled;
  for (const auto& t : r.tables) {
    for (const auto& row : t.rows) pooled.push_back(row.ae);
  }
  const auto spec = fit_box_cox(pooled);
  r.all_transform = spec;

  std::vector<Cell> cells;
  std::map<Method, BestK> best;
  const double ks_alpha = tabulated_alpha(r.config.alpha) ? r.config.alpha : 0.05;
  for (std::size_t i = 0; i < r.tables.size(); ++i) {
    const auto raw = r.tables[i].absolute_errors();
    auto transformed = apply_box_cox(raw, spec);
    const double mean = std::accumulate(transformed.begin(), transformed.end(), 0.0) /
                        static_cast<double>(transformed.size());
    r.transformed_means.push_back(mean);
    const auto v = variants[i];
    auto it = best.find(v.method);
    if (it == best.end() || mean < it->second.mean_transformed_ae) {
      best[v.method] = {v.method, v.k, mean};
    }
    r.normality.push_back({r.tables[i].label, try_ks(raw, ks_alpha), try_ks(transformed, ks_alpha)});
    cells.push_back({std::string(method_name(v.method)), v.k, std::move(transformed)});
  }
  for (auto m : kMethods) {
    if (const auto it = best.find(m); it != best.end()) r.best_k.push_back(it->second);
  }
  try {
    auto types = scott_knott_two_way(cells, r.config.alpha);
    types.transform = spec;
    r.types = std::move(types);
  } catch (const std::exception& e) {
    r.notes.push_back(std::string("two-way Scott-Knott skipped: ") + e.what());
  }
  if (!tabulated_alpha(r.config.alpha)) {
    r.notes.push_back("normality checks use alpha 0.05 (alpha not tabulated)");
  }
}

}  // namespace

PipelineReport run_pipeline(const Dataset& data, const ExperimentConfig& config) {
  PipelineReport r;
  r.dataset = data.name();
  r.n = data.size();
  r.m = data.feature_count();
  r.config = config;

  const int k_max = usable_k_max(data.size(), config.k_max);
  if (k_max < config.k_max) {
    r.notes.push_back("k limited to " + std::to_string(k_max) + " by dataset size");
  }
  const auto variants = enumerate_variants(k_max);
  r.tables = loocv_all(data, variants, config);
  r.baseline = dataset_baseline(data, config);
  if (!r.baseline.defined() || !(r.baseline.sp0 > 0.0)) {
    r.notes.push_back("random-guess baseline is degenerate; SA and Delta undefined");
    return r;
  }
  for (const auto& t : r.tables) r.summaries.push_back(summarize(t, r.baseline));

  r.verdicts = filter_actual_predictors(r.summaries, config.delta_threshold);
  std::vector<PredictionTable> survivor_tables;
  for (std::size_t i = 0; i < r.verdicts.size(); ++i) {
    if (!r.verdicts[i].kept) continue;
    r.survivors.push_back(r.verdicts[i].label);
    survivor_tables.push_back(r.tables[i]);
  }
  if (r.survivors.empty()) r.notes.push_back("no variant passed the filter");

  try {
    auto best = select_best_cluster(survivor_tables, config.alpha);
    r.best = std::move(best.members);
    r.clustering = std::move(best.clustering);
  } catch (const std::exception& e) {
    r.notes.push_back(std::string("Scott-Knott on survivors failed: ") + e.what());
    r.best = r.survivors;
  }

  std::vector<EvalSummary> best_summaries;
  for (const auto& label : r.best) best_summaries.push_back(*r.summary(label));
  if (best_summaries.size() >= 2) {
    r.borda = rank_summaries(best_summaries);
    r.ranked_best = borda_order(*r.borda, best_summaries);
  } else {
    r.ranked_best = r.best;
  }

  r.ensembles = build_ensembles(r.ranked_best);
  for (const auto& e : r.ensembles) {
    r.ensemble_tables.push_back(ensemble_table(e, r.tables));
    r.ensemble_summaries.push_back(summarize(r.ensemble_tables.back(), r.baseline));
  }

  for (const auto& label : r.ranked_best) r.joint_summaries.push_back(*r.summary(label));
  for (const auto& s : r.ensemble_summaries) r.joint_summaries.push_back(s);
  rank_singles_and_ensembles(r);

  analyse_all_variants(r, variants);
  return r;
}

}  // namespace ebae
