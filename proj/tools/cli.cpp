#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ebae/error.hpp"
#include "ebae/report.hpp"

namespace ebae::cli {
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string data;
  std::string schema;
  std::string out = "./report";
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<double> alpha;
  std::optional<int> k_max;
  std::optional<int> threads;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ExperimentConfig build_config(const Options& o) {
  ExperimentConfig c;
  if (const char* env = std::getenv("EBAE_SEED"); env && *env) c.set("seed", env);
  if (!o.config_file.empty()) c.load_file(o.config_file);
  for (const auto& s : o.sets) c.apply(s);
  if (o.seed) c.seed = *o.seed;
  if (o.runs) c.set("runs", std::to_string(*o.runs));
  if (o.alpha) c.set("alpha", fmt::format("{}", *o.alpha));
  if (o.k_max) c.set("k_max", std::to_string(*o.k_max));
  if (o.threads) c.set("threads", std::to_string(*o.threads));
  return c;
}

Dataset load(const Options& o) {
  if (o.data.empty() || o.schema.empty()) throw UsageError("--data and --schema are required");
  return load_dataset(o.data, o.schema);
}

void add_data_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--data", o.data, "dataset CSV")->required();
  cmd->add_option("--schema", o.schema, "schema sidecar")->required();
}

void add_experiment_options(CLI::App* cmd, Options& o) {
  add_data_options(cmd, o);
  cmd->add_option("--seed", o.seed, "global seed (default 42, or EBAE_SEED)");
  cmd->add_option("--runs", o.runs, "random-guess Monte-Carlo runs (default 1000)");
  cmd->add_option("--alpha", o.alpha, "Scott-Knott significance level (default 0.05)");
  cmd->add_option("--k-max", o.k_max, "largest number of analogies (default 5)");
  cmd->add_option("--threads", o.threads, "worker threads for LOOCV folds (default 1)");
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--set", o.sets, "config override key=value (repeatable)");
  cmd->add_option("--config", o.config_file, "key=value config file");
}

int cmd_describe(const Options& o, std::ostream& out) {
  const auto ds = load(o);
  const auto s = describe(ds);
  out << "dataset,n,m,min,max,mean,median,skewness\n";
  out << ds.name() << ',' << s.n << ',' << s.m << ',' << fmt::format("{}", s.min) << ','
      << fmt::format("{}", s.max) << ',' << fmt::format("{}", s.mean) << ','
      << fmt::format("{}", s.median) << ',' << fmt::format("{}", s.skewness) << '\n';
  return 0;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const auto ds = load(o);
  const auto config = build_config(o);
  const auto variants = enumerate_variants(usable_k_max(ds.size(), config.k_max));
  const auto tables = loocv_all(ds, variants, config);
  const auto base = dataset_baseline(ds, config);
  std::vector<EvalSummary> summaries;
  for (const auto& t : tables) summaries.push_back(summarize(t, base));
  const auto verdicts = filter_actual_predictors(summaries, config.delta_threshold);
  const auto path = fs::path(o.out) / "variants.csv";
  write_file_atomically(path,
                        [&](std::ostream& f) { write_variants_csv(f, summaries, verdicts); });
  std::size_t kept = 0;
  for (const auto& v : verdicts) kept += v.kept ? 1 : 0;
  out << fmt::format("{} variants evaluated, {} kept; wrote {}\n", summaries.size(), kept,
                     path.string());
  return 0;
}

int cmd_pipeline(const Options& o, std::ostream& out) {
  const auto ds = load(o);
  const auto config = build_config(o);
  const auto report = run_pipeline(ds, config);
  write_report(report, o.out);
  out << fmt::format("{} kept, best cluster {}, {} ensembles; wrote {}\n", report.survivors.size(),
                     report.best.size(), report.ensembles.size(), o.out);
  return 0;
}

int cmd_fixture(const std::string& dir, std::ostream& out) {
  fs::create_directories(dir);
  {
    std::ofstream f(fs::path(dir) / "toy.csv");
    f << "id,size,effort\nT1,2,4\nT2,4,8\nT3,6,12\nT4,8,20\nT5,10,30\n";
  }
  {
    std::ofstream f(fs::path(dir) / "toy.schema");
    f << "id=identifier,continuous,none\nsize=feature,continuous,primary_size\n"
         "effort=effort,continuous,none\n";
  }
  out << "wrote " << (fs::path(dir) / "toy.csv").string() << " and toy.schema\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Analogy-based effort estimation experiments", "ebae"};
  app.require_subcommand(1);
  Options o;
  std::string fixture_dir = ".";

  auto* describe_cmd = app.add_subcommand("describe", "print effort statistics of a dataset");
  add_data_options(describe_cmd, o);
  auto* evaluate_cmd = app.add_subcommand("evaluate", "LOOCV-evaluate all variants");
  add_experiment_options(evaluate_cmd, o);
  auto* pipeline_cmd = app.add_subcommand("pipeline", "run the full ensemble pipeline");
  add_experiment_options(pipeline_cmd, o);
  auto* fixture_cmd = app.add_subcommand("fixture", "write the five-project toy dataset");
  fixture_cmd->add_option("--out", fixture_dir, "output directory")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*describe_cmd) return cmd_describe(o, out);
    if (*evaluate_cmd) return cmd_evaluate(o, out);
    if (*pipeline_cmd) return cmd_pipeline(o, out);
    if (*fixture_cmd) return cmd_fixture(fixture_dir, out);
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "evaluation failed: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace ebae::cli
