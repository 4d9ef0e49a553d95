#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include "wdro/data.hpp"
#include "wdro/model.hpp"
#include "wdro/solver.hpp"

namespace wdro {

struct BaselineConfig {
  double gamma = 0.0;
  bool penalize_intercept = false;
  /// Separable-data guard on every coefficient.
  double coef_bound = 1e4;
  SolverConfig solver;

  void validate() const;
};

struct FitResult {
  ModelParams beta;
  double objective = 0.0;
  /// Some coefficient sits at the magnitude cap (the data is likely separable).
  bool at_cap = false;
  /// gamma = 0 and every training margin is positive: the loss infimum 0 is
  /// only approached as the coefficients grow, so beta reflects the tolerance or cap.
  bool separable = false;
  std::string diagnostic;
};

/// Thrown when the conic solver does not return an optimal point.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Empirical log-loss (+ gamma * l1 penalty) through the conic solver.
FitResult fit_logistic(const Dataset& data, const BaselineConfig& config = {});

ModelParams train_lr(const Dataset& data);
ModelParams train_regularized_lr(const Dataset& data, double gamma);

struct Prediction {
  int label;
  double probability;  // P(y = +1)
};

/// Label +1 iff score >= 0.
Prediction predict(const ModelParams& beta, std::span<const double> x, std::span<const int> z);

double classification_error(const ModelParams& beta, const Dataset& data);

}  // namespace wdro
