#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ebae {

enum class Role { Feature, Effort, Identifier, Ignored };
enum class Kind { Continuous, Categorical };
enum class SizeFlag { None, PrimarySize, SizeRelated };

/// One line of the schema sidecar: `<column>=<role>,<kind>,<size_flag>`.
struct ColumnSpec {
  std::string name;
  Role role = Role::Feature;
  Kind kind = Kind::Continuous;
  SizeFlag size_flag = SizeFlag::None;

  friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

using Schema = std::vector<ColumnSpec>;

/// Parses schema sidecar text. Validates the column-level invariants
/// (unique names, exactly one effort column, at most one primary size,
/// size flags only on continuous columns).
Schema parse_schema(std::istream& in);
Schema read_schema(const std::filesystem::path& path);
void write_schema(std::ostream& out, const Schema& schema);

/// A feature column of a loaded dataset (role=feature only).
struct FeatureSpec {
  std::string name;
  Kind kind = Kind::Continuous;
  SizeFlag size_flag = SizeFlag::None;
  /// Category symbols in first-seen order; a categorical value is stored
  /// as the index into this list.
  std::vector<std::string> categories;

  bool is_size_related() const { return size_flag != SizeFlag::None; }
  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

struct Project {
  std::string id;
  /// Raw values, one per feature; categorical entries hold category codes.
  std::vector<double> features;
  double effort = 0.0;

  friend bool operator==(const Project&, const Project&) = default;
};

struct FeatureBounds {
  double min = 0.0;
  double max = 0.0;
  friend bool operator==(const FeatureBounds&, const FeatureBounds&) = default;
};

/// Immutable effort dataset. Normalization bounds are derived from the rows
/// it holds, so a subset (e.g. a training fold) has its own bounds.
class Dataset {
 public:
  Dataset(std::string name, std::vector<FeatureSpec> features,
          std::vector<Project> projects, std::string effort_column = "effort",
          std::string id_column = "id");

  const std::string& name() const { return name_; }
  const std::vector<FeatureSpec>& features() const { return features_; }
  const std::vector<Project>& projects() const { return projects_; }
  const Project& project(std::size_t i) const { return projects_.at(i); }
  const std::vector<FeatureBounds>& bounds() const { return bounds_; }
  const std::string& effort_column() const { return effort_column_; }
  const std::string& id_column() const { return id_column_; }

  std::size_t size() const { return projects_.size(); }
  std::size_t feature_count() const { return features_.size(); }

  /// Index of the primary size feature, if the schema declares one.
  std::optional<std::size_t> primary_size() const { return primary_size_; }
  /// Indices of features flagged primary_size or size_related.
  const std::vector<std::size_t>& size_related() const { return size_related_; }

  std::vector<double> efforts() const;

  /// Copy holding only the given rows (order preserved); bounds are recomputed.
  Dataset subset(std::span<const std::size_t> rows) const;
  /// Copy without one row; the leave-one-out training set.
  Dataset without(std::size_t row) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::string name_;
  std::vector<FeatureSpec> features_;
  std::vector<Project> projects_;
  std::string effort_column_;
  std::string id_column_;
  std::vector<FeatureBounds> bounds_;
  std::optional<std::size_t> primary_size_;
  std::vector<std::size_t> size_related_;
};

/// Loads a CSV dataset described by a schema sidecar. Throws DataError on
/// schema/header mismatch, missing or non-numeric values, non-positive
/// effort, duplicate ids, or fewer than three rows.
Dataset load_dataset(const std::filesystem::path& data_path,
                     const std::filesystem::path& schema_path);
Dataset parse_dataset(std::istream& csv, const Schema& schema, std::string name);

/// Writes the dataset back as CSV (features, identifier and effort columns;
/// ignored columns are gone). Re-loading with `dataset_schema(ds)` yields an
/// equal Dataset.
void write_csv(std::ostream& out, const Dataset& dataset);
Schema dataset_schema(const Dataset& dataset);

/// Min-max scaler over continuous features. Categorical codes pass through.
class MinMaxScaler {
 public:
  explicit MinMaxScaler(const Dataset& fitted_on);
  MinMaxScaler(std::vector<FeatureBounds> bounds, std::vector<Kind> kinds);

  /// Maps continuous values to [0,1]; values outside the fitted range are
  /// clamped, constant features map to 0.
  std::vector<double> transform(std::span<const double> raw) const;
  const std::vector<FeatureBounds>& bounds() const { return bounds_; }

 private:
  std::vector<FeatureBounds> bounds_;
  std::vector<Kind> kinds_;
};

/// Normalized feature rows for retrieval; raw values stay in the Dataset.
struct NormalizedView {
  std::vector<std::vector<double>> rows;
  std::vector<FeatureBounds> bounds;
};

NormalizedView normalize_minmax(const Dataset& dataset);

/// Target-minus-other raw feature difference; categorical entries are the
/// 0/1 mismatch indicator.
std::vector<double> feature_difference(const Project& target, const Project& other,
                                       std::span<const FeatureSpec> features);

struct EffortStats {
  std::size_t n = 0;
  std::size_t m = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double median = 0.0;
  /// Adjusted Fisher-Pearson skewness; 0 when all efforts are equal.
  double skewness = 0.0;
};

EffortStats describe(const Dataset& dataset);

double median(std::vector<double> values);
double sample_skewness(std::span<const double> values);

}  // namespace ebae
