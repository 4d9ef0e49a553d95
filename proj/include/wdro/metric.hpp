#pragma once

#include <span>
#include <string>
#include <vector>

namespace wdro {

enum class Norm { L1, L2, Linf };

const char* to_string(Norm norm);
Norm parse_norm(const std::string& text);
/// L1 <-> Linf, L2 <-> L2.
Norm dual_of(Norm norm);

/// Ground metric ||x - x'|| + (#categorical disagreements)^(1/p) + kappa * [y != y'].
struct GroundMetricConfig {
  Norm norm = Norm::L1;
  std::vector<double> weights;  // empty = unweighted; else one positive weight per numeric feature
  double p = 1.0;
  double kappa = 1.0;

  /// Throws std::invalid_argument on p <= 0, kappa <= 0 or non-positive weights.
  void validate() const;
};

/// Weighted norm: L1 = sum w|v|, L2 = sqrt(sum (w v)^2), Linf = max w|v|.
double norm_value(std::span<const double> v, Norm norm, std::span<const double> weights = {});
/// Dual of the weighted norm above (reciprocal weights on the dual side).
double dual_norm(std::span<const double> v, Norm norm, std::span<const double> weights = {});

double d_categorical(std::span<const int> z, std::span<const int> z2, double p);
/// d_C for a known number of disagreements.
double categorical_distance(int disagreements, double p);

struct DataPoint {
  std::span<const double> x;
  std::span<const int> z;
  int y;
};

double ground_distance(const DataPoint& a, const DataPoint& b, const GroundMetricConfig& config);

}  // namespace wdro
