#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wdro/conic_model.hpp"
#include "wdro/data.hpp"
#include "wdro/metric.hpp"

namespace wdro {

/// Most violated index of one constraint family for one data point.
struct ViolationReport {
  int i = -1;
  Family family = Family::Plus;
  std::vector<int> z;
  /// max(0, v(z) - 1), zeroed below the separation threshold.
  double violation = 0.0;
  /// log v(z); v(z) itself may overflow.
  double log_value = -kInfinity;
  /// Candidates evaluated (m + 1 for most_violated).
  int candidates = 0;

  double value() const;
};

/// log v(z) = softplus(theta(z)) - s_i - lambda * (d_C(z, z^i) [+ kappa for Minus]),
/// theta = -y^i * score for Plus and +y^i * score for Minus.
double log_violation_value(int i, std::span<const int> z, Family family, const ModelParams& beta, double lambda,
                           double s_i, const Dataset& data, const GroundMetricConfig& metric);

/// exp of the above (may be +inf).
double violation_value(int i, std::span<const int> z, Family family, const MasterSolution& solution,
                       const Dataset& data, const GroundMetricConfig& metric);

/// Per-feature best replacement category (ties to the lower index) and the
/// resulting gain in theta; `order` sorts features by gain, ties by index.
/// Flipping order[0..delta) maximizes theta among z with delta disagreements.
struct FlipPlan {
  double theta0 = 0.0;
  std::vector<int> category;
  std::vector<double> gain;
  std::vector<int> order;
};

FlipPlan flip_plan(int i, Family family, const ModelParams& beta, const Dataset& data);

/// Greedy exact maximizer of v(z) over all configurations: per feature the best
/// non-observed category, features sorted by gain (ties by index), and the best
/// of the m + 1 prefix flips. The value is recomputed with log_violation_value.
ViolationReport most_violated(int i, Family family, const MasterSolution& solution, const Dataset& data,
                              const GroundMetricConfig& metric, double threshold = 1e-8);

struct SeparationOptions {
  double threshold = 1e-8;
  bool label_flip = true;
  /// Cuts kept per family, one per data point, most violated first.
  int top_j = 1;
  int workers = 1;
};

struct SeparationResult {
  ViolationReport best_plus;
  ViolationReport best_minus;
  /// Up to top_j reports per family with positive violation, ordered by
  /// (violation desc, i asc, z asc).
  std::vector<ViolationReport> plus;
  std::vector<ViolationReport> minus;
  std::int64_t candidates = 0;
};

/// Runs most_violated for every data point and both families. The result does
/// not depend on the worker count.
SeparationResult separate_all(const MasterSolution& solution, const Dataset& data, const GroundMetricConfig& metric,
                              const SeparationOptions& options = {});

}  // namespace wdro
