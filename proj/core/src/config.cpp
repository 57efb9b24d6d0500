#include "ebae/config.hpp"

#include <charconv>
#include <fstream>

#include "ebae/error.hpp"

namespace ebae {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto* begin = value.data();
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("invalid value '" + std::string(value) + "' for key '" +
                      std::string(key) + "'");
  }
  return out;
}

int parse_positive_int(std::string_view key, std::string_view value) {
  const int v = parse_number<int>(key, value);
  if (v <= 0) throw ConfigError("key '" + std::string(key) + "' must be positive");
  return v;
}

double parse_unit_interval(std::string_view key, std::string_view value) {
  const double v = parse_number<double>(key, value);
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ConfigError("key '" + std::string(key) + "' must lie in [0,1]");
  }
  return v;
}

}  // namespace

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  auto& l = learners;
  if (key == "mt.min_leaf") {
    l.mt_min_leaf = parse_positive_int(key, value);
  } else if (key == "mt.max_depth") {
    l.mt_max_depth = parse_number<int>(key, value);
    if (l.mt_max_depth < 0) throw ConfigError("mt.max_depth must be >= 0");
  } else if (key == "nn.hidden") {
    l.nn_hidden = parse_positive_int(key, value);
  } else if (key == "nn.epochs") {
    l.nn_epochs = parse_number<int>(key, value);
    if (l.nn_epochs < 0) throw ConfigError("nn.epochs must be >= 0");
  } else if (key == "nn.lr") {
    l.nn_lr = parse_number<double>(key, value);
    if (!(l.nn_lr > 0.0)) throw ConfigError("nn.lr must be positive");
  } else if (key == "ga.pop") {
    l.ga_pop = parse_positive_int(key, value);
    if (l.ga_pop < 2) throw ConfigError("ga.pop must be >= 2");
  } else if (key == "ga.gens") {
    l.ga_gens = parse_number<int>(key, value);
    if (l.ga_gens < 0) throw ConfigError("ga.gens must be >= 0");
  } else if (key == "ga.cx") {
    l.ga_cx = parse_unit_interval(key, value);
  } else if (key == "ga.mut") {
    l.ga_mut = parse_unit_interval(key, value);
  } else if (key == "ga.range") {
    l.ga_range = parse_number<double>(key, value);
    if (!(l.ga_range > 0.0)) throw ConfigError("ga.range must be positive");
  } else if (key == "rtm.mean") {
    if (value == "fold") {
      l.rtm_mean = RtmMean::Fold;
    } else if (value == "local") {
      l.rtm_mean = RtmMean::Local;
    } else {
      throw ConfigError("rtm.mean must be 'fold' or 'local'");
    }
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "runs") {
    baseline_runs = parse_positive_int(key, value);
  } else if (key == "alpha") {
    alpha = parse_number<double>(key, value);
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  } else if (key == "k_max") {
    k_max = parse_positive_int(key, value);
  } else if (key == "delta_threshold") {
    delta_threshold = parse_number<double>(key, value);
  } else if (key == "threads") {
    threads = parse_positive_int(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

void ExperimentConfig::apply(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  }
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

void ExperimentConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    const auto body = trim(std::string_view(line).substr(0, line.find('#')));
    if (!body.empty()) apply(body);
  }
}

}  // namespace ebae
