#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wdro/conic_model.hpp"
#include "wdro/data.hpp"
#include "wdro/separation.hpp"
#include "wdro/solver.hpp"

namespace wdro {

struct CutMeta {
  int added_iteration = 0;
  int times_deleted = 0;
  double last_slack = 0.0;
};

/// Generated index pairs per family, kept in insertion order. A cut that was
/// deleted once and later re-added is never deleted again.
class CutPool {
 public:
  /// Returns false when the key is already present.
  bool add(Family family, const CutKey& key, int iteration);
  bool contains(Family family, const CutKey& key) const;
  void remove(Family family, const CutKey& key);

  const std::vector<CutKey>& keys(Family family) const;
  const CutMeta& meta(Family family, const CutKey& key) const;
  CutMeta& meta(Family family, const CutKey& key);
  std::size_t size(Family family) const { return keys(family).size(); }

 private:
  struct Side {
    std::vector<CutKey> order;
    std::map<CutKey, CutMeta> live;
    std::map<CutKey, int> deletions;  // survives removal
  };
  Side& side(Family f) { return f == Family::Plus ? plus_ : minus_; }
  const Side& side(Family f) const { return f == Family::Plus ? plus_ : minus_; }
  Side plus_;
  Side minus_;
};

struct EasingConfig {
  bool enabled = false;
  /// Periodic: t = period, 2 period, ...; Geometric: t = ceil(start * 1.5^q), q = 0, 1, ...
  enum class Schedule { Periodic, Geometric } schedule = Schedule::Periodic;
  int period = 200;
  int start = 100;
  /// Constant: slack > 0.05; Increasing: 0.02 at the first event, +0.02 per event.
  enum class Threshold { Constant, Increasing } threshold = Threshold::Constant;
};

/// True when iteration t (1-based) is an easing iteration.
bool easing_scheduled(const EasingConfig& config, int t);
/// Slack threshold used at the `event`-th easing event (0-based).
double easing_threshold(const EasingConfig& config, int event);

struct EngineConfig {
  double gap_tol = 1e-6;
  double violation_threshold = 1e-8;
  int max_iterations = 100000;
  int top_j = 1;
  /// Seed both pools with the observed points (i, z^i); false starts empty.
  bool seed_with_data = true;
  EasingConfig easing;
  SolverConfig solver;
  int workers = 1;
  double time_limit_seconds = kInfinity;
  /// Optional warm start: returns a starting point for the new master given the
  /// previous master solution (cold by default).
  std::function<std::vector<double>(const BuiltModel&, const MasterSolution&)> warm_start;
};

struct TraceRow {
  int iteration = 0;
  double master_value = 0.0;
  double lb = 0.0;
  double ub = kInfinity;
  double violation_plus = 0.0;
  double violation_minus = 0.0;
  std::size_t pool_plus = 0;
  std::size_t pool_minus = 0;
  int cuts_added = 0;
  int cuts_removed = 0;
  double master_seconds = 0.0;
  double separation_seconds = 0.0;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  bool converged = false;
  bool iteration_cap_reached = false;
  bool time_limit_reached = false;
  std::string message;
  double total_seconds = 0.0;

  double final_lb() const { return rows.empty() ? -kInfinity : rows.back().lb; }
  double final_ub() const { return rows.empty() ? kInfinity : rows.back().ub; }
  double final_gap() const { return final_ub() - final_lb(); }

  void write_csv(std::ostream& out) const;
  std::string to_csv() const;
};

struct RunResult {
  ModelParams beta;
  MasterSolution master;
  RunTrace trace;
  CutPool pool;
  /// Best upper bound on the robust optimum (equals the master value at convergence).
  double value() const { return trace.final_ub(); }
};

/// Master solve failure with the iteration it happened in.
class MasterSolveError : public std::runtime_error {
 public:
  MasterSolveError(int iteration, SolveStatus status, const std::string& detail);
  int iteration;
  SolveStatus status;
};

/// Upper bound certified by a master value and the largest violations:
/// theta + log(1 + max(violation_plus, violation_minus)).
double upper_bound_candidate(double master_value, double violation_plus, double violation_minus);

CutPool seed_pool(const Dataset& data, bool seed_with_data = true, bool label_flip = true);

/// Removes cuts whose slack 1 - (u + v) exceeds the event threshold, skipping
/// cuts deleted before. Returns the number removed; updates last_slack.
int ease(CutPool& pool, const BuiltModel& master, const MasterSolution& solution, const EasingConfig& config,
         int event);

/// Column-and-constraint generation. epsilon = 0 solves the empirical-risk
/// program directly. With `fixed_beta` the coefficients stay fixed and the run
/// computes the worst-case expected loss of that model.
RunResult run(const Dataset& data, const DroConfig& dro, const EngineConfig& engine = {},
              const ModelParams* fixed_beta = nullptr);

/// Supremum of the expected log-loss of `beta` over the Wasserstein ball.
double evaluate_worst_case_loss(const ModelParams& beta, const Dataset& data, const DroConfig& dro,
                                const EngineConfig& engine = {});

}  // namespace wdro
