#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wdro/model.hpp"

namespace wdro {

enum class MissingPolicy { NewCategory, DropRow };

/// Column roles and preprocessing rules for CSV ingestion.
///
/// JSON layout:
///   { "label": "class", "positive": "majority" | "<class value>",
///     "numeric": [...], "categorical": [...], "ignore": [...],
///     "missing": "new-category" | "drop-row", "missing_token": "?",
///     "standardize": false }
/// When "categorical" is absent every column not named elsewhere is categorical.
struct DatasetSchema {
  std::string label;
  std::string positive = "majority";
  std::vector<std::string> numeric;
  std::vector<std::string> categorical;
  bool categorical_is_rest = true;
  std::vector<std::string> ignored;
  MissingPolicy missing = MissingPolicy::NewCategory;
  std::string missing_token = "?";
  bool standardize = false;

  static DatasetSchema from_json_text(const std::string& text);
  static DatasetSchema load(const std::string& path);
  std::string to_json_text() const;
};

/// Mixed-feature data set. Categorical features are stored as category
/// indices; index 0 is the reference category (all-zero one-hot block).
struct Dataset {
  Eigen::MatrixXd X;  // N x n
  Eigen::MatrixXi Z;  // N x m
  Eigen::VectorXi y;  // entries in {-1, +1}
  std::vector<int> cardinalities;

  std::vector<std::string> numeric_names;
  std::vector<std::string> categorical_names;
  std::vector<std::vector<std::string>> categories;  // optional dictionaries
  std::string label_name = "y";
  std::string positive_label = "1";
  std::string negative_label = "-1";

  int N() const { return static_cast<int>(y.size()); }
  int n() const { return static_cast<int>(X.cols()); }
  int m() const { return static_cast<int>(Z.cols()); }
  /// Number of categorical slopes, sum_j (k_j - 1).
  int k() const;
  /// Start of feature j's block inside the flat categorical slope vector.
  std::vector<int> block_offsets() const;

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;

  Dataset subset(std::span<const int> rows) const;
  std::vector<int> categorical_row(int i) const;
};

/// Assembles a dataset from arrays; names default to x1.., z1.. and validate() is run.
Dataset make_dataset(Eigen::MatrixXd X, Eigen::MatrixXi Z, Eigen::VectorXi y, std::vector<int> cardinalities);

/// RFC-4180 style reader: quoted fields, doubled quotes, CRLF tolerated.
std::vector<std::vector<std::string>> read_csv(std::istream& in);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

Dataset ingest_csv(std::istream& in, const DatasetSchema& schema);
Dataset ingest_csv(const std::string& path, const DatasetSchema& schema);

/// Column layout, dictionaries and label rule of a training set, so that other
/// files are encoded identically (no dictionary rebuilding, no majority vote).
///
/// JSON layout:
///   { "numeric": [..], "categorical": [{"name": .., "categories": [..]}, ..],
///     "label": .., "positive": .., "missing": .., "missing_token": ..,
///     "mean": [..], "scale": [..] }      (mean/scale only when standardized)
struct FeatureEncoding {
  std::vector<std::string> numeric;
  std::vector<std::string> categorical;
  std::vector<std::vector<std::string>> categories;
  std::string label;
  std::string positive;
  MissingPolicy missing = MissingPolicy::NewCategory;
  std::string missing_token = "?";
  std::vector<double> mean;
  std::vector<double> scale;

  /// Requires category dictionaries on `data`.
  static FeatureEncoding of(const Dataset& data, const DatasetSchema& schema);
  std::string to_json_text() const;
  static FeatureEncoding from_json_text(const std::string& text);
};

/// Encodes a CSV with the given layout. Any label other than the positive class
/// is negative; a category value outside the dictionary throws.
Dataset encode_csv(std::istream& in, const FeatureEncoding& encoding);
Dataset encode_csv(const std::string& path, const FeatureEncoding& encoding);

/// Writes header plus one row per record; categorical values use the
/// dictionaries when present, otherwise the index.
void write_dataset_csv(std::ostream& out, const Dataset& data);

/// One-hot block of length k_j - 1 for category `index` of a k_j-valued feature.
std::vector<int> one_hot(int index, int cardinality);
/// Inverse of one_hot; throws on blocks with more than one 1.
int decode_one_hot(std::span<const int> block);

std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction, std::uint64_t seed);

struct Fold {
  Dataset train;
  Dataset validation;
};
std::vector<Fold> k_folds(const Dataset& data, int K, std::uint64_t seed);

/// Z-score scaling of numeric columns fitted on one set and applied to others.
/// Columns with zero spread are only centred.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Standardizer fit(const Dataset& data);
  Dataset apply(const Dataset& data) const;
};

struct SyntheticInstance {
  Dataset data;
  ModelParams truth;
};

/// Binary-feature generator: (beta0, beta_C) i.i.d. standard normal scaled to
/// unit Euclidean norm, z uniform on {0,1}^m, y = +1 with logistic probability.
SyntheticInstance generate_synthetic(int N, int m, std::uint64_t seed);

/// Writes `<stem>.csv`, `<stem>.truth.json` and `<stem>.schema.json`.
void export_synthetic(const SyntheticInstance& inst, const std::string& stem);

}  // namespace wdro
