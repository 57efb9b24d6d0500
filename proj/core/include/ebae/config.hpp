#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace ebae {

/// Where the RTM adjustment regresses the analogy productivity to.
enum class RtmMean {
  Fold,   ///< mean productivity of all training projects
  Local,  ///< mean productivity of the k retrieved analogies
};

struct LearnerConfig {
  int mt_min_leaf = 4;
  int mt_max_depth = 6;

  int nn_hidden = 4;
  int nn_epochs = 500;
  double nn_lr = 0.01;

  int ga_pop = 50;
  int ga_gens = 100;
  double ga_cx = 0.8;
  double ga_mut = 0.1;
  double ga_range = 5.0;

  RtmMean rtm_mean = RtmMean::Fold;
};

struct ExperimentConfig {
  LearnerConfig learners;
  std::uint64_t seed = 42;
  int baseline_runs = 1000;
  double alpha = 0.05;
  int k_max = 5;
  double delta_threshold = 0.5;
  /// Worker threads for fold-level parallelism; results do not depend on it.
  int threads = 1;

  /// Applies one `key=value` override. Throws ConfigError for unknown keys
  /// or unparsable values.
  void set(std::string_view key, std::string_view value);
  /// Applies a `key=value` assignment string.
  void apply(std::string_view assignment);
  /// Reads a flat key-value file (`#` comments, blank lines ignored).
  void load_file(const std::filesystem::path& path);
};

}  // namespace ebae
