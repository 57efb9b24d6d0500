#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "ebae/analogy.hpp"
#include "ebae/stats.hpp"
#include "ebae/validation.hpp"

namespace {

const ebae::Dataset& albrecht() {
  static const auto ds = [] {
    const std::filesystem::path dir = EBAE_BENCH_DATA_DIR;
    return ebae::load_dataset(dir / "albrecht.csv", dir / "albrecht.schema");
  }();
  return ds;
}

void BM_RetrieveAll(benchmark::State& state) {
  const ebae::CaseBase base(albrecht());
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(base.self_neighborhoods(k));
}
BENCHMARK(BM_RetrieveAll)->Arg(1)->Arg(5);

void BM_LoocvDeterministic(benchmark::State& state) {
  const ebae::ExperimentConfig config;
  const std::vector<ebae::VariantId> variants{{ebae::Method::EBA, 3}, {ebae::Method::LSE, 3},
                                              {ebae::Method::RTM, 3}, {ebae::Method::AQUA, 3}};
  for (auto _ : state) benchmark::DoNotOptimize(ebae::loocv_all(albrecht(), variants, config));
}
BENCHMARK(BM_LoocvDeterministic)->Unit(benchmark::kMillisecond);

void BM_LoocvLearner(benchmark::State& state) {
  ebae::ExperimentConfig config;
  config.threads = static_cast<int>(state.range(0));
  const std::vector<ebae::VariantId> variants{{ebae::Method::MT, 2}, {ebae::Method::NN, 2},
                                              {ebae::Method::GA, 2}};
  for (auto _ : state) benchmark::DoNotOptimize(ebae::loocv_all(albrecht(), variants, config));
}
BENCHMARK(BM_LoocvLearner)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ScottKnott(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::vector<ebae::Group> groups(static_cast<std::size_t>(state.range(0)));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::lognormal_distribution<double> d(0.1 * static_cast<double>(g), 0.8);
    groups[g].label = "G" + std::to_string(g);
    for (int i = 0; i < 24; ++i) groups[g].values.push_back(d(rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(ebae::scott_knott(groups, 0.05));
}
BENCHMARK(BM_ScottKnott)->Arg(8)->Arg(40);

}  // namespace

BENCHMARK_MAIN();
