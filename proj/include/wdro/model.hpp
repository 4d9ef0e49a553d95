#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace wdro {

/// Logistic regression parameters (beta0, beta_N, beta_C). beta_cat is the
/// flat concatenation of per-feature blocks of length k_j - 1.
struct ModelParams {
  double beta0 = 0.0;
  Eigen::VectorXd beta_num;
  Eigen::VectorXd beta_cat;
  std::vector<int> cardinalities;

  static ModelParams zeros(int n, std::vector<int> cardinalities);

  int n() const { return static_cast<int>(beta_num.size()); }
  int m() const { return static_cast<int>(cardinalities.size()); }
  int k() const { return static_cast<int>(beta_cat.size()); }
  std::vector<int> block_offsets() const;

  /// Slope of category `index` of feature j (0 for the reference category).
  double category_slope(int j, int index) const;
  /// beta0 + beta_N.x + beta_C.onehot(z).
  double score(std::span<const double> x, std::span<const int> z) const;

  /// {"beta0": .., "beta_num": [..], "beta_cat": [[..], ..], "cardinalities": [..]}
  std::string to_json_text() const;
  static ModelParams from_json_text(const std::string& text);
  void save(const std::string& path) const;
  static ModelParams load(const std::string& path);
};

}  // namespace wdro
