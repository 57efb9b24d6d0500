#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ebae/data.hpp"

namespace ebae::test {

inline std::filesystem::path data_dir() { return EBAE_TEST_DATA_DIR; }

inline Dataset albrecht() {
  return load_dataset(data_dir() / "albrecht.csv", data_dir() / "albrecht.schema");
}

inline FeatureSpec continuous(std::string name, SizeFlag flag = SizeFlag::None) {
  FeatureSpec f;
  f.name = std::move(name);
  f.size_flag = flag;
  return f;
}

inline FeatureSpec categorical(std::string name, std::vector<std::string> symbols) {
  FeatureSpec f;
  f.name = std::move(name);
  f.kind = Kind::Categorical;
  f.categories = std::move(symbols);
  return f;
}

/// One primary size feature; rows given as (size, effort).
inline Dataset sized(const std::vector<std::pair<double, double>>& rows,
                     std::string name = "sized") {
  std::vector<Project> ps;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ps.push_back({"P" + std::to_string(i + 1), {rows[i].first}, rows[i].second});
  }
  return Dataset(std::move(name), {continuous("size", SizeFlag::PrimarySize)}, std::move(ps));
}

/// Sizes 2,4,6,8,10 with efforts 4,8,12,20,30.
inline Dataset toy() {
  return sized({{2, 4}, {4, 8}, {6, 12}, {8, 20}, {10, 30}}, "toy");
}

/// Random dataset: `m` continuous features (the first one primary size) and
/// optionally one 3-symbol categorical feature appended.
inline Dataset random_dataset(std::size_t n, std::size_t m, std::uint64_t seed,
                              bool with_categorical = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> value(1.0, 100.0);
  std::uniform_int_distribution<int> symbol(0, 2);
  std::vector<FeatureSpec> features;
  for (std::size_t j = 0; j < m; ++j) {
    features.push_back(continuous("f" + std::to_string(j),
                                  j == 0 ? SizeFlag::PrimarySize : SizeFlag::None));
  }
  if (with_categorical) features.push_back(categorical("lang", {"x", "y", "z"}));
  std::vector<Project> ps;
  for (std::size_t i = 0; i < n; ++i) {
    Project p;
    p.id = "R" + std::to_string(i);
    for (std::size_t j = 0; j < m; ++j) p.features.push_back(value(rng));
    if (with_categorical) p.features.push_back(symbol(rng));
    p.effort = value(rng) * 10.0;
    ps.push_back(std::move(p));
  }
  return Dataset("random", std::move(features), std::move(ps));
}

}  // namespace ebae::test
