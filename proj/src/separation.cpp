#include "wdro/separation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "wdro/util.hpp"

namespace wdro {

namespace {

double family_sign(Family family, int y) { return family == Family::Plus ? -y : y; }

std::vector<double> numeric_row(const Dataset& data, int i) {
  std::vector<double> x(static_cast<std::size_t>(data.n()));
  for (int j = 0; j < data.n(); ++j) x[static_cast<std::size_t>(j)] = data.X(i, j);
  return x;
}

void check_solution(const MasterSolution& sol, const Dataset& data) {
  if (static_cast<int>(sol.s.size()) != data.N()) throw std::invalid_argument("solution has the wrong number of s_i");
  if (sol.beta.n() != data.n() || sol.beta.cardinalities != data.cardinalities) {
    throw std::invalid_argument("solution coefficients do not match the data");
  }
}

// Strict weak order: violation desc, i asc, z asc.
bool ranks_before(const ViolationReport& a, const ViolationReport& b) {
  if (a.violation != b.violation) return a.violation > b.violation;
  if (a.i != b.i) return a.i < b.i;
  return a.z < b.z;
}

}  // namespace

double ViolationReport::value() const { return std::exp(log_value); }

double log_violation_value(int i, std::span<const int> z, Family family, const ModelParams& beta, double lambda,
                           double s_i, const Dataset& data, const GroundMetricConfig& metric) {
  if (i < 0 || i >= data.N()) throw std::invalid_argument("data index out of range");
  const auto x = numeric_row(data, i);
  const double theta = family_sign(family, data.y[i]) * beta.score(x, z);
  int diff = 0;
  for (int j = 0; j < data.m(); ++j) diff += z[static_cast<std::size_t>(j)] != data.Z(i, j) ? 1 : 0;
  double dist = categorical_distance(diff, metric.p);
  if (family == Family::Minus) dist += metric.kappa;
  // log(exp(-a) + exp(theta - a)) with a = s_i + lambda * dist.
  return softplus(theta) - s_i - lambda * dist;
}

double violation_value(int i, std::span<const int> z, Family family, const MasterSolution& solution,
                       const Dataset& data, const GroundMetricConfig& metric) {
  check_solution(solution, data);
  return std::exp(log_violation_value(i, z, family, solution.beta, solution.lambda,
                                      solution.s[static_cast<std::size_t>(i)], data, metric));
}

FlipPlan flip_plan(int i, Family family, const ModelParams& beta, const Dataset& data) {
  if (i < 0 || i >= data.N()) throw std::invalid_argument("data index out of range");
  const int m = data.m();
  const double sign = family_sign(family, data.y[i]);
  const std::vector<int> zi = data.categorical_row(i);
  FlipPlan plan;
  plan.theta0 = sign * beta.score(numeric_row(data, i), zi);
  plan.category.resize(static_cast<std::size_t>(m));
  plan.gain.resize(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const int observed = zi[static_cast<std::size_t>(j)];
    int arg = -1;
    double top = -kInfinity;
    for (int t = 0; t < data.cardinalities[static_cast<std::size_t>(j)]; ++t) {
      if (t == observed) continue;
      const double val = sign * beta.category_slope(j, t);
      if (val > top) {
        top = val;
        arg = t;
      }
    }
    plan.category[static_cast<std::size_t>(j)] = arg;
    plan.gain[static_cast<std::size_t>(j)] = top - sign * beta.category_slope(j, observed);
  }
  plan.order.resize(static_cast<std::size_t>(m));
  std::iota(plan.order.begin(), plan.order.end(), 0);
  std::stable_sort(plan.order.begin(), plan.order.end(), [&](int a, int b) {
    return plan.gain[static_cast<std::size_t>(a)] > plan.gain[static_cast<std::size_t>(b)];
  });
  return plan;
}

ViolationReport most_violated(int i, Family family, const MasterSolution& solution, const Dataset& data,
                              const GroundMetricConfig& metric, double threshold) {
  check_solution(solution, data);
  if (i < 0 || i >= data.N()) throw std::invalid_argument("data index out of range");
  const int m = data.m();
  const FlipPlan plan = flip_plan(i, family, solution.beta, data);
  const auto& order = plan.order;
  const auto& gain = plan.gain;

  ViolationReport rep;
  rep.i = i;
  rep.family = family;
  int best_delta = 0;
  double best_val = -kInfinity;
  double theta = plan.theta0;
  for (int delta = 0; delta <= m; ++delta) {
    if (delta > 0) theta += gain[static_cast<std::size_t>(order[static_cast<std::size_t>(delta - 1)])];
    const double val = softplus(theta) - solution.lambda * categorical_distance(delta, metric.p);
    ++rep.candidates;
    if (val > best_val) {
      best_val = val;
      best_delta = delta;
    }
  }
  rep.z = data.categorical_row(i);
  for (int q = 0; q < best_delta; ++q) {
    const int j = order[static_cast<std::size_t>(q)];
    rep.z[static_cast<std::size_t>(j)] = plan.category[static_cast<std::size_t>(j)];
  }
  rep.log_value =
      log_violation_value(i, rep.z, family, solution.beta, solution.lambda, solution.s[static_cast<std::size_t>(i)], data, metric);
  const double excess = rep.log_value > 0.0 ? std::expm1(rep.log_value) : 0.0;
  rep.violation = excess >= threshold ? excess : 0.0;
  return rep;
}

SeparationResult separate_all(const MasterSolution& solution, const Dataset& data, const GroundMetricConfig& metric,
                              const SeparationOptions& options) {
  check_solution(solution, data);
  const int N = data.N();
  std::vector<ViolationReport> plus(static_cast<std::size_t>(N));
  std::vector<ViolationReport> minus(options.label_flip ? static_cast<std::size_t>(N) : 0);
  parallel_for(N, options.workers, [&](int i) {
    plus[static_cast<std::size_t>(i)] = most_violated(i, Family::Plus, solution, data, metric, options.threshold);
    if (options.label_flip) {
      minus[static_cast<std::size_t>(i)] = most_violated(i, Family::Minus, solution, data, metric, options.threshold);
    }
  });

  SeparationResult out;
  out.best_minus.family = Family::Minus;
  auto reduce = [&](std::vector<ViolationReport>& all, ViolationReport& best, std::vector<ViolationReport>& top) {
    for (const auto& r : all) out.candidates += r.candidates;
    if (all.empty()) return;
    std::sort(all.begin(), all.end(), ranks_before);
    best = all.front();
    for (const auto& r : all) {
      if (static_cast<int>(top.size()) >= options.top_j || r.violation <= 0.0) break;
      top.push_back(r);
    }
  };
  reduce(plus, out.best_plus, out.plus);
  reduce(minus, out.best_minus, out.minus);
  return out;
}

}  // namespace wdro
