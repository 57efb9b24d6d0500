#include "ebae/report.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace ebae {
namespace fs = std::filesystem;

namespace {

std::string num(double v) { return fmt::format("{}", v); }

std::string opt(const std::optional<double>& v) { return v ? num(*v) : "NA"; }

std::string fixed(double v, int digits = 2) { return fmt::format("{:.{}f}", v, digits); }

std::string fixed(const std::optional<double>& v, int digits = 2) {
  return v ? fixed(*v, digits) : "NA";
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) s += sep;
    s += items[i];
  }
  return s;
}

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const PredictionTable* find_table(const PipelineReport& r, const std::string& label) {
  for (const auto* list : {&r.tables, &r.ensemble_tables}) {
    for (const auto& t : *list) {
      if (t.label == label) return &t;
    }
  }
  return nullptr;
}

void write_summary_row(std::ostream& out, const EvalSummary& s) {
  out << quoted(s.label) << ',' << num(s.mae) << ',' << num(s.mmre) << ',' << num(s.pred25)
      << ',' << num(s.lsd) << ',' << num(s.mbre) << ',' << num(s.mibre) << ',' << num(s.sa)
      << ',' << num(s.delta);
}

void write_filter_csv(std::ostream& out, const PipelineReport& r) {
  out << "variant,SA,SA5,Delta,kept,reason\n";
  for (std::size_t i = 0; i < r.verdicts.size(); ++i) {
    const auto& v = r.verdicts[i];
    const auto& s = r.summaries[i];
    out << v.label << ',' << num(s.sa) << ',' << num(s.baseline.sa5) << ',' << num(s.delta) << ','
        << (v.kept ? "yes" : "no") << ',' << quoted(v.reason) << '\n';
  }
}

void write_clusters_csv(std::ostream& out, const PipelineReport& r,
                        const std::optional<ScottKnottResult>& sk) {
  out << "cluster,variant,mean_transformed_ae,MAE,lambda,shift\n";
  if (!sk) return;
  for (std::size_t c = 0; c < sk->clusters.size(); ++c) {
    const auto& cl = sk->clusters[c];
    for (std::size_t i = 0; i < cl.members.size(); ++i) {
      const auto* s = r.summary(cl.members[i]);
      out << c + 1 << ',' << cl.members[i] << ',' << num(cl.means[i]) << ','
          << (s ? num(s->mae) : "NA") << ',' << num(sk->transform.lambda) << ','
          << num(sk->transform.shift) << '\n';
    }
  }
}

void write_borda_csv(std::ostream& out, const PipelineReport& r) {
  out << "rank,variant,score,xi,MAE_rank,LSD_rank,MBRE_rank,MIBRE_rank\n";
  if (!r.borda) {
    if (r.ranked_best.size() == 1) out << "1," << r.ranked_best.front() << ",0,0,1,1,1,1\n";
    return;
  }
  const auto& b = *r.borda;
  for (const auto& label : r.ranked_best) {
    const auto c = static_cast<std::size_t>(
        std::find(b.candidates.begin(), b.candidates.end(), label) - b.candidates.begin());
    out << b.rank[c] << ',' << label << ',' << b.scores[c] << ',' << num(b.xi[c]);
    for (int vr : b.voter_ranks[c]) out << ',' << vr;
    out << '\n';
  }
}

void write_ensembles_csv(std::ostream& out, const PipelineReport& r) {
  out << "ensemble,members,MAE,MMRE,Pred25,LSD,MBRE,MIBRE,SA,Delta\n";
  for (std::size_t i = 0; i < r.ensembles.size(); ++i) {
    const auto& s = r.ensemble_summaries[i];
    out << r.ensembles[i].id << ',' << join(r.ensembles[i].members, ";") << ',';
    out << num(s.mae) << ',' << num(s.mmre) << ',' << num(s.pred25) << ',' << num(s.lsd) << ','
        << num(s.mbre) << ',' << num(s.mibre) << ',' << num(s.sa) << ',' << num(s.delta) << '\n';
  }
}

void write_joint_csv(std::ostream& out, const PipelineReport& r) {
  out << "rank,method,xi,score,cluster\n";
  if (!r.joint) return;
  const auto& j = *r.joint;
  for (const auto& label : r.joint_order) {
    const auto c = static_cast<std::size_t>(
        std::find(j.candidates.begin(), j.candidates.end(), label) - j.candidates.begin());
    out << j.rank[c] << ',' << label << ',' << num(j.xi[c]) << ',' << j.scores[c] << ',';
    if (r.joint_clustering) {
      out << r.joint_clustering->cluster_of(label) + 1;
    } else {
      out << "NA";
    }
    out << '\n';
  }
}

void write_average_ranks_csv(std::ostream& out, const PipelineReport& r) {
  out << "group,mean_rank\n";
  out << "ensembles," << opt(r.average_ranks.ensembles) << '\n';
  out << "singles," << opt(r.average_ranks.singles) << '\n';
}

void write_best_k_csv(std::ostream& out, const PipelineReport& r) {
  out << "method,best_k,mean_transformed_ae\n";
  for (const auto& b : r.best_k) {
    out << method_name(b.method) << ',' << b.k << ',' << num(b.mean_transformed_ae) << '\n';
  }
}

void write_types_csv(std::ostream& out, const PipelineReport& r) {
  out << "cluster,type,mean_transformed_ae\n";
  if (!r.types) return;
  for (std::size_t c = 0; c < r.types->clusters.size(); ++c) {
    const auto& cl = r.types->clusters[c];
    for (std::size_t i = 0; i < cl.members.size(); ++i) {
      out << c + 1 << ',' << cl.members[i] << ',' << num(cl.means[i]) << '\n';
    }
  }
}

void write_plot_csv(std::ostream& out, const PipelineReport& r,
                    const std::optional<ScottKnottResult>& sk) {
  out << "cluster,variant,observation,transformed_ae\n";
  if (!sk) return;
  for (std::size_t c = 0; c < sk->clusters.size(); ++c) {
    for (const auto& label : sk->clusters[c].members) {
      const auto* t = find_table(r, label);
      if (!t) continue;
      const auto values = apply_box_cox(t->absolute_errors(), sk->transform);
      for (std::size_t i = 0; i < values.size(); ++i) {
        out << c + 1 << ',' << label << ',' << t->rows[i].id << ',' << num(values[i]) << '\n';
      }
    }
  }
}

void write_normality_csv(std::ostream& out, const PipelineReport& r) {
  out << "variant,raw_D,raw_critical,raw_reject,transformed_D,transformed_critical,"
         "transformed_reject\n";
  const auto cells = [](const std::optional<KsResult>& k) {
    if (!k) return std::string("NA,NA,NA");
    return num(k->statistic) + ',' + num(k->critical) + ',' + (k->reject ? "yes" : "no");
  };
  for (const auto& n : r.normality) {
    out << n.label << ',' << cells(n.raw) << ',' << cells(n.transformed) << '\n';
  }
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& fill) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fill(out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

fs::path normalized_target(const fs::path& out) {
  auto p = out.lexically_normal();
  if (p.filename().empty()) p = p.parent_path();
  if (p.empty()) throw std::invalid_argument("empty output path");
  return p;
}

fs::path sibling_temp(const fs::path& target) {
  const auto parent = target.parent_path().empty() ? fs::path(".") : target.parent_path();
  return parent / ("." + target.filename().string() + ".tmp");
}

}  // namespace

void write_variants_csv(std::ostream& out, std::span<const EvalSummary> summaries,
                        std::span<const FilterVerdict> verdicts) {
  out << "variant,MAE,MMRE,Pred25,LSD,MBRE,MIBRE,SA,Delta,SA5,fallback_count,kept\n";
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    const auto& s = summaries[i];
    write_summary_row(out, s);
    out << ',' << num(s.baseline.sa5) << ',' << s.fallback_count << ','
        << (i < verdicts.size() && verdicts[i].kept ? "yes" : "no") << '\n';
  }
}

std::string render_summary(const PipelineReport& r) {
  std::string s;
  auto line = [&s](const std::string& l = {}) {
    s += l;
    s += '\n';
  };
  line("# Effort estimation report: " + r.dataset);
  line();
  line(fmt::format("{} projects, {} features. Seed {}, {} baseline runs, alpha {}.", r.n, r.m,
                   r.config.seed, r.config.baseline_runs, r.config.alpha));
  line();
  line(fmt::format("Random guessing: MAE_p0 = {}, SP0 = {}, SA5 = {}%.", fixed(r.baseline.mae_p0),
                   fixed(r.baseline.sp0), fixed(100.0 * r.baseline.sa5, 1)));
  line();

  line("## Variant accuracy");
  line();
  line("| Variant | MAE | SA (%) | Delta | LSD | MBRE | MIBRE | MMRE | Pred25 | Fallbacks | Kept |");
  line("|---|---|---|---|---|---|---|---|---|---|---|");
  for (std::size_t i = 0; i < r.summaries.size(); ++i) {
    const auto& v = r.summaries[i];
    line(fmt::format("| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |", v.label,
                     fixed(v.mae), fixed(100.0 * v.sa, 1), fixed(v.delta), fixed(v.lsd),
                     fixed(v.mbre), fixed(v.mibre), fixed(v.mmre), fixed(v.pred25, 1),
                     v.fallback_count, r.verdicts[i].kept ? "yes" : "no"));
  }
  line();
  line(fmt::format("{} of {} variants kept: {}", r.survivors.size(), r.summaries.size(),
                   r.survivors.empty() ? std::string("none") : join(r.survivors, ", ")));
  line();

  const auto clusters = [&](const std::optional<ScottKnottResult>& sk) {
    if (!sk) {
      line("Not clustered.");
      line();
      return;
    }
    line(fmt::format("Box-Cox lambda {}, shift {}.", fixed(sk->transform.lambda),
                     num(sk->transform.shift)));
    line();
    line("| Cluster | Members | Mean transformed AE |");
    line("|---|---|---|");
    for (std::size_t c = 0; c < sk->clusters.size(); ++c) {
      line(fmt::format("| {} | {} | {} |", c + 1, join(sk->clusters[c].members, ", "),
                       fixed(sk->clusters[c].mean, 3)));
    }
    line();
  };

  line("## Scott-Knott clusters of kept variants");
  line();
  clusters(r.clustering);
  line("Best cluster: " + (r.best.empty() ? std::string("none") : join(r.best, ", ")));
  line();

  line("## Borda ranking of the best cluster");
  line();
  if (r.borda) {
    line("| Rank | Method | Score | xi |");
    line("|---|---|---|---|");
    const auto& b = *r.borda;
    for (const auto& label : r.ranked_best) {
      const auto c = static_cast<std::size_t>(
          std::find(b.candidates.begin(), b.candidates.end(), label) - b.candidates.begin());
      line(fmt::format("| {} | {} | {} | {} |", b.rank[c], label, b.scores[c], fixed(b.xi[c])));
    }
    line();
    line("Collective order: " + b.render());
  } else {
    line("Fewer than two candidates; no ranking.");
  }
  line();

  line("## Ensembles");
  line();
  if (r.ensembles.empty()) {
    line("No ensembles built.");
  } else {
    line("| Ensemble | Members | MAE | SA (%) | Delta | LSD | MBRE | MIBRE |");
    line("|---|---|---|---|---|---|---|---|");
    for (std::size_t i = 0; i < r.ensembles.size(); ++i) {
      const auto& e = r.ensemble_summaries[i];
      line(fmt::format("| {} | {} | {} | {} | {} | {} | {} | {} |", r.ensembles[i].id,
                       join(r.ensembles[i].members, ", "), fixed(e.mae), fixed(100.0 * e.sa, 1),
                       fixed(e.delta), fixed(e.lsd), fixed(e.mbre), fixed(e.mibre)));
    }
  }
  line();

  line("## Joint ranking of best singles and ensembles");
  line();
  if (r.joint) {
    line("| Rank | Method | xi |");
    line("|---|---|---|");
    const auto& j = *r.joint;
    for (const auto& label : r.joint_order) {
      const auto c = static_cast<std::size_t>(
          std::find(j.candidates.begin(), j.candidates.end(), label) - j.candidates.begin());
      line(fmt::format("| {} | {} | {} |", j.rank[c], label, fixed(j.xi[c])));
    }
  } else {
    line("Fewer than two candidates; no joint ranking.");
  }
  line();

  line("## Average ranks");
  line();
  line("| Group | Mean rank |");
  line("|---|---|");
  line("| Ensembles | " + fixed(r.average_ranks.ensembles) + " |");
  line("| Singles | " + fixed(r.average_ranks.singles) + " |");
  line();

  line("## Best k per method");
  line();
  line("| Method | Best k | Mean transformed AE |");
  line("|---|---|---|");
  for (const auto& b : r.best_k) {
    line(fmt::format("| {} | {} | {} |", method_name(b.method), b.k,
                     fixed(b.mean_transformed_ae, 3)));
  }
  line();

  line("## Adjustment types");
  line();
  clusters(r.types);

  std::size_t raw_reject = 0;
  std::size_t transformed_reject = 0;
  std::size_t tested = 0;
  for (const auto& n : r.normality) {
    if (n.raw) {
      ++tested;
      raw_reject += n.raw->reject ? 1 : 0;
    }
    if (n.transformed && n.transformed->reject) ++transformed_reject;
  }
  line("## Normality");
  line();
  line(fmt::format("Raw absolute errors rejected as normal for {} of {} variants; "
                   "transformed errors for {}.",
                   raw_reject, tested, transformed_reject));
  line();

  if (!r.notes.empty()) {
    line("## Notes");
    line();
    for (const auto& n : r.notes) line("- " + n);
    line();
  }
  return s;
}

void write_report_files(const PipelineReport& r, const fs::path& dir) {
  fs::create_directories(dir / "plotdata");
  write_file(dir / "variants.csv",
             [&](std::ostream& o) { write_variants_csv(o, r.summaries, r.verdicts); });
  write_file(dir / "filter.csv", [&](std::ostream& o) { write_filter_csv(o, r); });
  write_file(dir / "scott_knott.csv",
             [&](std::ostream& o) { write_clusters_csv(o, r, r.clustering); });
  write_file(dir / "borda.csv", [&](std::ostream& o) { write_borda_csv(o, r); });
  write_file(dir / "ensembles.csv", [&](std::ostream& o) { write_ensembles_csv(o, r); });
  write_file(dir / "joint_ranking.csv", [&](std::ostream& o) { write_joint_csv(o, r); });
  write_file(dir / "average_ranks.csv", [&](std::ostream& o) { write_average_ranks_csv(o, r); });
  write_file(dir / "best_k.csv", [&](std::ostream& o) { write_best_k_csv(o, r); });
  write_file(dir / "scott_knott_types.csv", [&](std::ostream& o) { write_types_csv(o, r); });
  write_file(dir / "summary.md", [&](std::ostream& o) { o << render_summary(r); });
  write_file(dir / "plotdata" / "kept_clusters.csv",
             [&](std::ostream& o) { write_plot_csv(o, r, r.clustering); });
  write_file(dir / "plotdata" / "joint_clusters.csv",
             [&](std::ostream& o) { write_plot_csv(o, r, r.joint_clustering); });
  write_file(dir / "plotdata" / "normality.csv",
             [&](std::ostream& o) { write_normality_csv(o, r); });
}

void write_directory_atomically(const fs::path& out,
                                const std::function<void(const fs::path&)>& fill) {
  const auto target = normalized_target(out);
  if (!target.parent_path().empty()) fs::create_directories(target.parent_path());
  const auto tmp = sibling_temp(target);
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  try {
    fill(tmp);
    fs::remove_all(target);
    fs::rename(tmp, target);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw;
  }
}

void write_report(const PipelineReport& r, const fs::path& out) {
  write_directory_atomically(out, [&](const fs::path& dir) { write_report_files(r, dir); });
}

void write_file_atomically(const fs::path& path, const std::function<void(std::ostream&)>& fill) {
  const auto target = normalized_target(path);
  if (!target.parent_path().empty()) fs::create_directories(target.parent_path());
  const auto tmp = sibling_temp(target);
  try {
    write_file(tmp, fill);
    fs::rename(tmp, target);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

}  // namespace ebae
