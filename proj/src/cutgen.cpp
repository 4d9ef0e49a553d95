#include "wdro/cutgen.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "wdro/data.hpp"
#include "wdro/util.hpp"

namespace wdro {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

bool CutPool::add(Family family, const CutKey& key, int iteration) {
  auto& s = side(family);
  if (s.live.count(key)) return false;
  CutMeta meta;
  meta.added_iteration = iteration;
  if (auto it = s.deletions.find(key); it != s.deletions.end()) meta.times_deleted = it->second;
  s.live.emplace(key, meta);
  s.order.push_back(key);
  return true;
}

bool CutPool::contains(Family family, const CutKey& key) const { return side(family).live.count(key) > 0; }

void CutPool::remove(Family family, const CutKey& key) {
  auto& s = side(family);
  if (!s.live.erase(key)) return;
  s.order.erase(std::find(s.order.begin(), s.order.end(), key));
  ++s.deletions[key];
}

const std::vector<CutKey>& CutPool::keys(Family family) const { return side(family).order; }

const CutMeta& CutPool::meta(Family family, const CutKey& key) const { return side(family).live.at(key); }
CutMeta& CutPool::meta(Family family, const CutKey& key) { return side(family).live.at(key); }

bool easing_scheduled(const EasingConfig& config, int t) {
  if (!config.enabled || t <= 0) return false;
  if (config.schedule == EasingConfig::Schedule::Periodic) return config.period > 0 && t % config.period == 0;
  if (config.start <= 0) return false;
  for (int q = 0;; ++q) {
    const auto at = static_cast<int>(std::ceil(config.start * std::pow(1.5, q) - 1e-9));
    if (at == t) return true;
    if (at > t) return false;
  }
}

double easing_threshold(const EasingConfig& config, int event) {
  if (config.threshold == EasingConfig::Threshold::Constant) return 0.05;
  return 0.02 * (event + 1);
}

void RunTrace::write_csv(std::ostream& out) const {
  write_csv_row(out, {"iteration", "master_value", "lb", "ub", "violation_plus", "violation_minus", "pool_plus",
                      "pool_minus", "cuts_added", "cuts_removed", "master_seconds", "separation_seconds"});
  for (const auto& r : rows) {
    write_csv_row(out, {std::to_string(r.iteration), num(r.master_value), num(r.lb), num(r.ub), num(r.violation_plus),
                        num(r.violation_minus), std::to_string(r.pool_plus), std::to_string(r.pool_minus),
                        std::to_string(r.cuts_added), std::to_string(r.cuts_removed), num(r.master_seconds),
                        num(r.separation_seconds)});
  }
}

std::string RunTrace::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

MasterSolveError::MasterSolveError(int it, SolveStatus st, const std::string& detail)
    : std::runtime_error("master solve failed at iteration " + std::to_string(it) + ": " + to_string(st) +
                         (detail.empty() ? "" : " (" + detail + ")")),
      iteration(it),
      status(st) {}

double upper_bound_candidate(double master_value, double violation_plus, double violation_minus) {
  return master_value + std::log1p(std::max(violation_plus, violation_minus));
}

CutPool seed_pool(const Dataset& data, bool seed_with_data, bool label_flip) {
  CutPool pool;
  if (!seed_with_data) return pool;
  for (int i = 0; i < data.N(); ++i) {
    const CutKey key{i, data.categorical_row(i)};
    pool.add(Family::Plus, key, 0);
    if (label_flip) pool.add(Family::Minus, key, 0);
  }
  return pool;
}

int ease(CutPool& pool, const BuiltModel& master, const MasterSolution& solution, const EasingConfig& config,
         int event) {
  const double threshold = easing_threshold(config, event);
  const auto& cuts = master.layout.cuts;
  std::vector<std::pair<Family, CutKey>> drop;
  for (std::size_t k = 0; k < cuts.size() && k < solution.u.size(); ++k) {
    const auto& c = cuts[k];
    if (!pool.contains(c.family, c.key)) continue;
    auto& meta = pool.meta(c.family, c.key);
    meta.last_slack = 1.0 - (solution.u[k] + solution.v[k]);
    if (meta.last_slack > threshold && meta.times_deleted == 0) drop.emplace_back(c.family, c.key);
  }
  for (const auto& [family, key] : drop) pool.remove(family, key);
  return static_cast<int>(drop.size());
}

RunResult run(const Dataset& data, const DroConfig& dro, const EngineConfig& engine, const ModelParams* fixed_beta) {
  dro.validate();
  data.validate();
  const auto t_start = Clock::now();
  RunResult out;
  RunTrace& trace = out.trace;

  if (dro.epsilon == 0.0) {
    TraceRow row;
    row.iteration = 1;
    if (fixed_beta) {
      out.beta = *fixed_beta;
      row.master_value = empirical_log_loss(*fixed_beta, data);
    } else {
      const auto t0 = Clock::now();
      const BuiltModel model = build_monolithic(data, dro);
      const SolveResult res = solve(model.program, engine.solver);
      row.master_seconds = seconds_since(t0);
      if (!res.optimal()) throw MasterSolveError(1, res.status, res.message);
      out.master = extract_solution(model, res);
      out.beta = out.master.beta;
      row.master_value = res.objective;
    }
    row.lb = row.ub = row.master_value;
    trace.rows.push_back(row);
    trace.converged = true;
    trace.total_seconds = seconds_since(t_start);
    return out;
  }

  out.pool = seed_pool(data, engine.seed_with_data, dro.label_flip);
  CutPool& pool = out.pool;
  SeparationOptions sep;
  sep.threshold = engine.violation_threshold;
  sep.label_flip = dro.label_flip;
  sep.top_j = engine.top_j;
  sep.workers = engine.workers;

  double lb = -kInfinity;
  double ub = kInfinity;
  int easing_events = 0;
  std::optional<MasterSolution> previous;
  for (int t = 1;; ++t) {
    TraceRow row;
    row.iteration = t;
    const auto t_master = Clock::now();
    const BuiltModel model = build_reduced_master(data, pool.keys(Family::Plus), pool.keys(Family::Minus), dro, fixed_beta);
    BuiltModel warm;
    const BuiltModel* active = &model;
    if (engine.warm_start && previous) {
      warm = model;
      warm.program.set_initial_point(engine.warm_start(model, *previous));
      active = &warm;
    }
    const SolveResult res = solve(active->program, engine.solver);
    row.master_seconds = seconds_since(t_master);
    if (!res.optimal()) throw MasterSolveError(t, res.status, res.message);
    MasterSolution sol = extract_solution(*active, res);

    const auto t_sep = Clock::now();
    const SeparationResult found = separate_all(sol, data, dro.metric, sep);
    row.separation_seconds = seconds_since(t_sep);

    const double theta = res.objective;
    const double worst = std::max(found.best_plus.violation, found.best_minus.violation);
    lb = std::max(lb, theta);
    ub = std::min(ub, upper_bound_candidate(theta, found.best_plus.violation, found.best_minus.violation));
    row.master_value = theta;
    row.lb = lb;
    row.ub = ub;
    row.violation_plus = found.best_plus.violation;
    row.violation_minus = found.best_minus.violation;

    const bool done = ub - lb <= engine.gap_tol || worst <= 0.0;
    if (!done) {
      for (const auto* list : {&found.plus, &found.minus}) {
        for (const auto& r : *list) row.cuts_added += pool.add(r.family, {r.i, r.z}, t) ? 1 : 0;
      }
      if (easing_scheduled(engine.easing, t)) row.cuts_removed = ease(pool, *active, sol, engine.easing, easing_events++);
    }
    row.pool_plus = pool.size(Family::Plus);
    row.pool_minus = pool.size(Family::Minus);
    trace.rows.push_back(row);
    out.master = std::move(sol);
    previous = out.master;

    if (done) {
      trace.converged = true;
      break;
    }
    if (row.cuts_added == 0 && row.cuts_removed == 0) {
      trace.message = "violated cuts are already in the pool; master accuracy limits the gap";
      break;
    }
    if (t >= engine.max_iterations) {
      trace.iteration_cap_reached = true;
      trace.message = "iteration cap reached";
      break;
    }
    if (seconds_since(t_start) > engine.time_limit_seconds) {
      trace.time_limit_reached = true;
      trace.message = "time limit reached";
      break;
    }
  }
  out.beta = fixed_beta ? *fixed_beta : out.master.beta;
  trace.total_seconds = seconds_since(t_start);
  return out;
}

double evaluate_worst_case_loss(const ModelParams& beta, const Dataset& data, const DroConfig& dro,
                                const EngineConfig& engine) {
  if (dro.epsilon == 0.0) return empirical_log_loss(beta, data);
  const RunResult r = run(data, dro, engine, &beta);
  if (!r.trace.converged) throw std::runtime_error("worst-case evaluation did not converge: " + r.trace.message);
  return r.value();
}

}  // namespace wdro
