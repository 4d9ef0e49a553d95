#include "wdro/baselines.hpp"

#include <cmath>
#include <stdexcept>

#include "wdro/conic_model.hpp"

namespace wdro {

void BaselineConfig::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be finite and >= 0");
  if (!(coef_bound > 0.0)) throw std::invalid_argument("coef_bound must be positive");
}

FitResult fit_logistic(const Dataset& data, const BaselineConfig& config) {
  config.validate();
  if (data.N() == 0) throw std::invalid_argument("cannot train on an empty dataset");
  const BuiltModel model = build_erm(data, config.gamma, config.coef_bound, config.penalize_intercept);
  const SolveResult res = solve(model.program, config.solver);
  if (!res.optimal()) {
    throw TrainingError(std::string("logistic regression solve failed: ") + to_string(res.status) +
                        (res.message.empty() ? "" : " (" + res.message + ")"));
  }
  const MasterSolution sol = extract_solution(model, res);
  FitResult out;
  out.beta = sol.beta;
  out.objective = res.objective;
  out.at_cap = sol.coefficient_at_bound;
  out.diagnostic = sol.message;
  if (config.gamma == 0.0) {
    // Every margin positive: scaling beta up keeps lowering the loss.
    out.separable = true;
    for (int i = 0; i < data.N() && out.separable; ++i) {
      Eigen::VectorXd xi = data.X.row(i).transpose();
      out.separable = data.y(i) * out.beta.score({xi.data(), static_cast<std::size_t>(xi.size())},
                                                 data.categorical_row(i)) > 0.0;
    }
    if (out.separable) {
      out.diagnostic += (out.diagnostic.empty() ? "" : "; ") +
                        std::string("training data is separable; the unregularized optimum is not attained");
    }
  }
  return out;
}

ModelParams train_lr(const Dataset& data) { return fit_logistic(data).beta; }

ModelParams train_regularized_lr(const Dataset& data, double gamma) {
  BaselineConfig cfg;
  cfg.gamma = gamma;
  return fit_logistic(data, cfg).beta;
}

Prediction predict(const ModelParams& beta, std::span<const double> x, std::span<const int> z) {
  const double s = beta.score(x, z);
  const double prob = s >= 0.0 ? 1.0 / (1.0 + std::exp(-s)) : std::exp(s) / (1.0 + std::exp(s));
  return {s >= 0.0 ? 1 : -1, prob};
}

double classification_error(const ModelParams& beta, const Dataset& data) {
  if (data.N() == 0) throw std::invalid_argument("empty dataset");
  int wrong = 0;
  std::vector<double> x(static_cast<std::size_t>(data.n()));
  for (int i = 0; i < data.N(); ++i) {
    for (int j = 0; j < data.n(); ++j) x[static_cast<std::size_t>(j)] = data.X(i, j);
    const auto z = data.categorical_row(i);
    wrong += predict(beta, x, z).label != data.y[i] ? 1 : 0;
  }
  return static_cast<double>(wrong) / data.N();
}

}  // namespace wdro
