#include "ebae/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "ebae/error.hpp"

namespace ebae {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_simple(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// RFC-4180-ish: double quotes delimit fields, "" escapes a quote.
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      out.push_back(was_quoted ? field : trim(field));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw DataError(fmt::format("line {}: unterminated quoted field", line_no));
  out.push_back(was_quoted ? field : trim(field));
  return out;
}

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos && trim(s) == s) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Role parse_role(const std::string& s, const std::string& column) {
  if (s == "feature") return Role::Feature;
  if (s == "effort") return Role::Effort;
  if (s == "identifier") return Role::Identifier;
  if (s == "ignored") return Role::Ignored;
  throw DataError(fmt::format("schema: column '{}' has unknown role '{}'", column, s));
}

Kind parse_kind(const std::string& s, const std::string& column) {
  if (s == "continuous") return Kind::Continuous;
  if (s == "categorical") return Kind::Categorical;
  throw DataError(fmt::format("schema: column '{}' has unknown kind '{}'", column, s));
}

SizeFlag parse_size_flag(const std::string& s, const std::string& column) {
  if (s == "none") return SizeFlag::None;
  if (s == "primary_size") return SizeFlag::PrimarySize;
  if (s == "size_related") return SizeFlag::SizeRelated;
  throw DataError(fmt::format("schema: column '{}' has unknown size flag '{}'", column, s));
}

const char* to_string(Role r) {
  switch (r) {
    case Role::Feature: return "feature";
    case Role::Effort: return "effort";
    case Role::Identifier: return "identifier";
    case Role::Ignored: return "ignored";
  }
  return "?";
}

const char* to_string(Kind k) {
  return k == Kind::Continuous ? "continuous" : "categorical";
}

const char* to_string(SizeFlag f) {
  switch (f) {
    case SizeFlag::None: return "none";
    case SizeFlag::PrimarySize: return "primary_size";
    case SizeFlag::SizeRelated: return "size_related";
  }
  return "?";
}

void validate_schema(const Schema& schema) {
  std::unordered_set<std::string> names;
  int effort_columns = 0;
  int id_columns = 0;
  int primary = 0;
  for (const auto& c : schema) {
    if (c.name.empty()) throw DataError("schema: empty column name");
    if (!names.insert(c.name).second) {
      throw DataError(fmt::format("schema: duplicate column '{}'", c.name));
    }
    if (c.role == Role::Effort) {
      ++effort_columns;
      if (c.kind != Kind::Continuous) {
        throw DataError(fmt::format("schema: effort column '{}' must be continuous", c.name));
      }
    }
    if (c.role == Role::Identifier) ++id_columns;
    if (c.size_flag == SizeFlag::PrimarySize) ++primary;
    if (c.size_flag != SizeFlag::None && c.kind != Kind::Continuous) {
      throw DataError(fmt::format("schema: size column '{}' must be continuous", c.name));
    }
  }
  if (effort_columns != 1) {
    throw DataError(fmt::format("schema: expected exactly one effort column, found {}",
                                effort_columns));
  }
  if (id_columns > 1) throw DataError("schema: at most one identifier column is allowed");
  if (primary > 1) throw DataError("schema: at most one primary_size column is allowed");
}

bool is_missing(const std::string& field) { return field.empty() || field == "?"; }

double parse_real(const std::string& field, const std::string& column, std::size_t line_no) {
  double v = 0.0;
  const auto* begin = field.data();
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
    throw DataError(fmt::format("line {}: non-numeric value '{}' in continuous column '{}'",
                                line_no, field, column));
  }
  return v;
}

std::vector<FeatureBounds> compute_bounds(const std::vector<FeatureSpec>& features,
                                          const std::vector<Project>& projects) {
  std::vector<FeatureBounds> bounds(features.size());
  for (std::size_t j = 0; j < features.size(); ++j) {
    if (projects.empty()) continue;
    double lo = projects.front().features[j];
    double hi = lo;
    for (const auto& p : projects) {
      lo = std::min(lo, p.features[j]);
      hi = std::max(hi, p.features[j]);
    }
    bounds[j] = {lo, hi};
  }
  return bounds;
}

}  // namespace

Schema parse_schema(std::istream& in) {
  Schema schema;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.rfind('=');
    if (eq == std::string::npos) {
      throw DataError(fmt::format("schema line {}: expected <column>=<role>,<kind>,<size_flag>",
                                  line_no));
    }
    ColumnSpec spec;
    spec.name = trim(std::string_view(body).substr(0, eq));
    const auto parts = split_simple(std::string_view(body).substr(eq + 1), ',');
    if (parts.size() != 3) {
      throw DataError(fmt::format("schema line {}: expected three attributes for '{}'", line_no,
                                  spec.name));
    }
    spec.role = parse_role(parts[0], spec.name);
    spec.kind = parse_kind(parts[1], spec.name);
    spec.size_flag = parse_size_flag(parts[2], spec.name);
    schema.push_back(std::move(spec));
  }
  validate_schema(schema);
  return schema;
}

Schema read_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open schema file " + path.string());
  return parse_schema(in);
}

void write_schema(std::ostream& out, const Schema& schema) {
  for (const auto& c : schema) {
    out << c.name << '=' << to_string(c.role) << ',' << to_string(c.kind) << ','
        << to_string(c.size_flag) << '\n';
  }
}

Dataset::Dataset(std::string name, std::vector<FeatureSpec> features,
                 std::vector<Project> projects, std::string effort_column,
                 std::string id_column)
    : name_(std::move(name)),
      features_(std::move(features)),
      projects_(std::move(projects)),
      effort_column_(std::move(effort_column)),
      id_column_(std::move(id_column)) {
  for (std::size_t j = 0; j < features_.size(); ++j) {
    const auto& f = features_[j];
    if (f.size_flag == SizeFlag::PrimarySize) {
      if (primary_size_) throw DataError("dataset: more than one primary_size feature");
      primary_size_ = j;
    }
    if (f.is_size_related()) size_related_.push_back(j);
  }
  for (const auto& p : projects_) {
    if (p.features.size() != features_.size()) {
      throw DataError(fmt::format("project '{}' has {} features, schema has {}", p.id,
                                  p.features.size(), features_.size()));
    }
    if (!(p.effort > 0.0) || !std::isfinite(p.effort)) {
      throw DataError(fmt::format("project '{}': non-positive effort", p.id));
    }
  }
  bounds_ = compute_bounds(features_, projects_);
}

std::vector<double> Dataset::efforts() const {
  std::vector<double> out;
  out.reserve(projects_.size());
  for (const auto& p : projects_) out.push_back(p.effort);
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<Project> picked;
  picked.reserve(rows.size());
  for (auto r : rows) picked.push_back(projects_.at(r));
  return Dataset(name_, features_, std::move(picked), effort_column_, id_column_);
}

Dataset Dataset::without(std::size_t row) const {
  std::vector<std::size_t> rows;
  rows.reserve(projects_.size());
  for (std::size_t i = 0; i < projects_.size(); ++i) {
    if (i != row) rows.push_back(i);
  }
  return subset(rows);
}

Dataset parse_dataset(std::istream& csv, const Schema& schema, std::string name) {
  validate_schema(schema);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(csv, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
      }
      header = split_csv_line(line, line_no);
      break;
    }
  }
  if (header.empty()) throw DataError("dataset file is empty");

  std::unordered_map<std::string, const ColumnSpec*> by_name;
  for (const auto& c : schema) by_name.emplace(c.name, &c);
  std::set<std::string> seen;
  for (const auto& h : header) {
    if (!by_name.count(h)) {
      throw DataError(fmt::format("header column '{}' is not declared in the schema", h));
    }
    if (!seen.insert(h).second) throw DataError(fmt::format("duplicate header column '{}'", h));
  }
  for (const auto& c : schema) {
    if (!seen.count(c.name)) {
      throw DataError(fmt::format("schema column '{}' is missing from the header", c.name));
    }
  }

  std::vector<FeatureSpec> features;
  std::vector<std::size_t> feature_cols;
  std::optional<std::size_t> effort_col;
  std::optional<std::size_t> id_col;
  std::string effort_name;
  std::string id_name = "id";
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto& spec = *by_name.at(header[i]);
    switch (spec.role) {
      case Role::Feature:
        features.push_back({spec.name, spec.kind, spec.size_flag, {}});
        feature_cols.push_back(i);
        break;
      case Role::Effort:
        effort_col = i;
        effort_name = spec.name;
        break;
      case Role::Identifier:
        id_col = i;
        id_name = spec.name;
        break;
      case Role::Ignored:
        break;
    }
  }

  std::vector<Project> projects;
  std::unordered_set<std::string> ids;
  while (std::getline(csv, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line, line_no);
    if (fields.size() != header.size()) {
      throw DataError(fmt::format("line {}: expected {} fields, found {}", line_no,
                                  header.size(), fields.size()));
    }
    Project p;
    p.id = id_col ? fields[*id_col] : fmt::format("P{}", projects.size() + 1);
    if (p.id.empty()) throw DataError(fmt::format("line {}: empty identifier", line_no));
    if (!ids.insert(p.id).second) {
      throw DataError(fmt::format("line {}: duplicate id '{}'", line_no, p.id));
    }
    const auto& effort_field = fields[*effort_col];
    if (is_missing(effort_field)) {
      throw DataError(fmt::format("line {}: missing effort", line_no));
    }
    p.effort = parse_real(effort_field, effort_name, line_no);
    if (!(p.effort > 0.0)) {
      throw DataError(fmt::format("line {}: non-positive effort {}", line_no, effort_field));
    }
    p.features.reserve(features.size());
    for (std::size_t j = 0; j < features.size(); ++j) {
      const auto& field = fields[feature_cols[j]];
      auto& spec = features[j];
      if (is_missing(field)) {
        throw DataError(fmt::format("line {}: missing value in column '{}'", line_no, spec.name));
      }
      if (spec.kind == Kind::Continuous) {
        p.features.push_back(parse_real(field, spec.name, line_no));
      } else {
        auto it = std::find(spec.categories.begin(), spec.categories.end(), field);
        if (it == spec.categories.end()) {
          spec.categories.push_back(field);
          it = spec.categories.end() - 1;
        }
        p.features.push_back(static_cast<double>(it - spec.categories.begin()));
      }
    }
    projects.push_back(std::move(p));
  }
  if (projects.size() < 3) {
    throw DataError(fmt::format("dataset needs at least 3 projects, found {}", projects.size()));
  }
  return Dataset(std::move(name), std::move(features), std::move(projects),
                 std::move(effort_name), std::move(id_name));
}

Dataset load_dataset(const std::filesystem::path& data_path,
                     const std::filesystem::path& schema_path) {
  const Schema schema = read_schema(schema_path);
  std::ifstream in(data_path);
  if (!in) throw DataError("cannot open dataset file " + data_path.string());
  return parse_dataset(in, schema, data_path.stem().string());
}

Schema dataset_schema(const Dataset& dataset) {
  Schema schema;
  schema.push_back({dataset.id_column(), Role::Identifier, Kind::Continuous, SizeFlag::None});
  for (const auto& f : dataset.features()) {
    schema.push_back({f.name, Role::Feature, f.kind, f.size_flag});
  }
  schema.push_back({dataset.effort_column(), Role::Effort, Kind::Continuous, SizeFlag::None});
  return schema;
}

void write_csv(std::ostream& out, const Dataset& dataset) {
  out << quote_csv(dataset.id_column());
  for (const auto& f : dataset.features()) out << ',' << quote_csv(f.name);
  out << ',' << quote_csv(dataset.effort_column()) << '\n';
  for (const auto& p : dataset.projects()) {
    out << quote_csv(p.id);
    for (std::size_t j = 0; j < p.features.size(); ++j) {
      const auto& f = dataset.features()[j];
      if (f.kind == Kind::Continuous) {
        out << ',' << fmt::format("{}", p.features[j]);
      } else {
        out << ',' << quote_csv(f.categories.at(static_cast<std::size_t>(p.features[j])));
      }
    }
    out << ',' << fmt::format("{}", p.effort) << '\n';
  }
}

MinMaxScaler::MinMaxScaler(const Dataset& fitted_on) : bounds_(fitted_on.bounds()) {
  kinds_.reserve(fitted_on.feature_count());
  for (const auto& f : fitted_on.features()) kinds_.push_back(f.kind);
}

MinMaxScaler::MinMaxScaler(std::vector<FeatureBounds> bounds, std::vector<Kind> kinds)
    : bounds_(std::move(bounds)), kinds_(std::move(kinds)) {
  if (bounds_.size() != kinds_.size()) {
    throw std::invalid_argument("MinMaxScaler: bounds/kinds length mismatch");
  }
  for (const auto& b : bounds_) {
    if (!(b.min <= b.max)) throw std::invalid_argument("MinMaxScaler: min > max");
  }
}

std::vector<double> MinMaxScaler::transform(std::span<const double> raw) const {
  if (raw.size() != bounds_.size()) {
    throw std::invalid_argument("MinMaxScaler: feature count mismatch");
  }
  std::vector<double> out(raw.begin(), raw.end());
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (kinds_[j] != Kind::Continuous) continue;
    const auto [lo, hi] = bounds_[j];
    if (hi > lo) {
      out[j] = std::clamp((raw[j] - lo) / (hi - lo), 0.0, 1.0);
    } else {
      out[j] = 0.0;
    }
  }
  return out;
}

NormalizedView normalize_minmax(const Dataset& dataset) {
  const MinMaxScaler scaler(dataset);
  NormalizedView view;
  view.bounds = dataset.bounds();
  view.rows.reserve(dataset.size());
  for (const auto& p : dataset.projects()) view.rows.push_back(scaler.transform(p.features));
  return view;
}

std::vector<double> feature_difference(const Project& target, const Project& other,
                                       std::span<const FeatureSpec> features) {
  if (target.features.size() != features.size() || other.features.size() != features.size()) {
    throw std::invalid_argument("feature_difference: schema mismatch");
  }
  std::vector<double> d(features.size());
  for (std::size_t j = 0; j < features.size(); ++j) {
    if (features[j].kind == Kind::Continuous) {
      d[j] = target.features[j] - other.features[j];
    } else {
      d[j] = target.features[j] == other.features[j] ? 0.0 : 1.0;
    }
  }
  return d;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty sequence");
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double sample_skewness(std::span<const double> values) {
  const auto n = static_cast<double>(values.size());
  if (values.size() < 3) throw std::invalid_argument("skewness needs at least 3 values");
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double m2 = 0.0;
  double m3 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  if (m2 <= 0.0) return 0.0;
  const double g1 = m3 / std::pow(m2, 1.5);
  return std::sqrt(n * (n - 1.0)) / (n - 2.0) * g1;
}

EffortStats describe(const Dataset& dataset) {
  const auto efforts = dataset.efforts();
  if (efforts.empty()) throw std::invalid_argument("describe: empty dataset");
  EffortStats s;
  s.n = efforts.size();
  s.m = dataset.feature_count();
  const auto [lo, hi] = std::minmax_element(efforts.begin(), efforts.end());
  s.min = *lo;
  s.max = *hi;
  s.mean = std::accumulate(efforts.begin(), efforts.end(), 0.0) / static_cast<double>(s.n);
  s.median = median(efforts);
  s.skewness = efforts.size() >= 3 ? sample_skewness(efforts) : 0.0;
  return s;
}

}  // namespace ebae
