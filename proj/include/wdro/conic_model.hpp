#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wdro/conic_program.hpp"
#include "wdro/data.hpp"
#include "wdro/metric.hpp"
#include "wdro/model.hpp"
#include "wdro/solver.hpp"

namespace wdro {

/// Constraint family: Plus keeps the observed label, Minus flips it (pays lambda * kappa).
enum class Family { Plus, Minus };

/// Index pair (i, z) of a worst-case constraint; z holds category indices.
struct CutKey {
  int i = 0;
  std::vector<int> z;

  auto operator<=>(const CutKey&) const = default;
};

struct DroConfig {
  double epsilon = 0.1;
  GroundMetricConfig metric;
  /// false drops the label-flip family (the kappa -> infinity limit).
  bool label_flip = true;
  double lambda_max = 1e8;
  /// Magnitude cap on every coefficient; a solver safeguard for relaxed
  /// masters whose infimum is not attained.
  double coef_bound = 1e4;
  /// Optional Lasso weight on (beta_N, beta_C) added to the robust objective.
  double gamma = 0.0;
  /// Largest |C| = prod_j k_j the monolithic builder will enumerate.
  std::uint64_t enumeration_cap = std::uint64_t{1} << 20;

  void validate() const;
};

/// Positions of model quantities inside a built ConicProgram.
struct ModelLayout {
  int beta0 = -1;
  std::vector<int> beta_num;
  std::vector<int> beta_cat;
  int lambda = -1;  // -1 for the empirical-risk program
  std::vector<int> s;
  std::vector<int> lasso;  // |beta| auxiliaries when gamma > 0

  struct Cut {
    CutKey key;
    Family family;
    int u;
    int v;
    int row;  // u + v <= 1
  };
  std::vector<Cut> cuts;
  std::vector<int> cardinalities;
  double lambda_max = kInfinity;
};

struct BuiltModel {
  ConicProgram program;
  ModelLayout layout;
};

struct SoftplusHandles {
  int u;
  int v;
  int row;
};

/// Adds log(1 + exp(c)) <= a as u + v <= 1, (u, 1, -a) and (v, 1, c - a) in K_exp.
SoftplusHandles softplus_epigraph(ConicProgram& program, const AffineExpr& c, const AffineExpr& a);

/// Enumerates every (i, z) for both families. epsilon = 0 yields the
/// empirical-risk program without lambda.
BuiltModel build_monolithic(const Dataset& data, const DroConfig& config);

/// Same groups as the monolithic program but only for the listed pairs. With
/// `fixed_beta` the coefficients are fixed (worst-case evaluation).
BuiltModel build_reduced_master(const Dataset& data, std::span<const CutKey> plus, std::span<const CutKey> minus,
                                const DroConfig& config, const ModelParams* fixed_beta = nullptr);

/// Empirical log-loss plus gamma * ||(beta_N, beta_C)||_1 (and |beta0| when
/// requested) with |coef| <= coef_bound.
BuiltModel build_erm(const Dataset& data, double gamma = 0.0, double coef_bound = 1e4,
                     bool penalize_intercept = false);

/// Numeric-only variant: requires m = 0. Weighted L1 ground metric with the
/// given weights (empty = unweighted) and label weight kappa.
BuiltModel build_continuous_model(const Dataset& numeric_data, double epsilon, double kappa,
                                  std::vector<double> weights = {});

struct MasterSolution {
  ModelParams beta;
  double lambda = 0.0;
  std::vector<double> s;
  double objective = 0.0;
  SolveStatus status = SolveStatus::Numerical;
  std::vector<double> u;  // per layout cut
  std::vector<double> v;
  bool lambda_at_bound = false;
  bool coefficient_at_bound = false;
  std::string message;
};

MasterSolution extract_solution(const BuiltModel& model, const SolveResult& result);

/// Empirical mean log-loss of beta on the data.
double empirical_log_loss(const ModelParams& beta, const Dataset& data);

/// Numerically stable log(1 + exp(t)).
double softplus(double t);

/// Number of categorical configurations prod_j k_j (saturates at UINT64_MAX).
std::uint64_t configuration_count(std::span<const int> cardinalities);

}  // namespace wdro
