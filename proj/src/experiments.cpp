#include "wdro/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "wdro/baselines.hpp"
#include "wdro/conic_model.hpp"
#include "wdro/util.hpp"

namespace wdro {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::string csv_text(const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  for (const auto& r : rows) write_csv_row(os, r);
  return os.str();
}

// Outer tasks run on the worker pool; everything inside them is sequential.
ExperimentConfig inner(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.workers = 1;
  c.engine.workers = 1;
  return c;
}

EstimateSummary summarize(std::vector<double> slopes) {
  EstimateSummary s;
  s.slopes = std::move(slopes);
  double total = 0.0;
  for (double v : s.slopes) total += v;
  s.mean = total / static_cast<double>(s.slopes.size());
  s.q15 = quantile(s.slopes, 0.15);
  s.q85 = quantile(s.slopes, 0.85);
  return s;
}

}  // namespace

std::string Method::name() const {
  const char* k = kappa == KappaRule::One ? "(kappa=1)" : "(kappa=m)";
  switch (kind) {
    case MethodKind::LR: return "LR";
    case MethodKind::RegularizedLR: return "r-LR";
    case MethodKind::Dro: return std::string("DRO") + k;
    case MethodKind::RegularizedDro: return std::string("r-DRO") + k;
  }
  return "?";
}

Method Method::parse(const std::string& text) {
  for (const auto& m : table_methods(true)) {
    if (m.name() == text) return m;
  }
  if (text == "lr") return {MethodKind::LR, KappaRule::One};
  if (text == "rlr") return {MethodKind::RegularizedLR, KappaRule::One};
  if (text == "dro") return {MethodKind::Dro, KappaRule::One};
  if (text == "dro-m") return {MethodKind::Dro, KappaRule::NumFeatures};
  if (text == "rdro") return {MethodKind::RegularizedDro, KappaRule::One};
  if (text == "rdro-m") return {MethodKind::RegularizedDro, KappaRule::NumFeatures};
  throw std::invalid_argument("unknown method: " + text);
}

std::vector<Method> table_methods(bool include_regularized_dro) {
  std::vector<Method> out{{MethodKind::LR, KappaRule::One},
                          {MethodKind::RegularizedLR, KappaRule::One},
                          {MethodKind::Dro, KappaRule::One},
                          {MethodKind::Dro, KappaRule::NumFeatures}};
  if (include_regularized_dro) {
    out.push_back({MethodKind::RegularizedDro, KappaRule::One});
    out.push_back({MethodKind::RegularizedDro, KappaRule::NumFeatures});
  }
  return out;
}

double kappa_value(KappaRule rule, const Dataset& data) {
  return rule == KappaRule::One ? 1.0 : static_cast<double>(std::max(data.m(), 1));
}

std::vector<double> log_grid(double lo, double hi, int points_per_decade, bool with_zero) {
  if (!(lo > 0.0) || !(hi >= lo) || points_per_decade < 1) throw std::invalid_argument("bad log grid bounds");
  std::vector<double> out;
  if (with_zero) out.push_back(0.0);
  const double decades = std::log10(hi / lo);
  const int steps = static_cast<int>(std::lround(decades * points_per_decade));
  for (int i = 0; i <= steps; ++i) {
    out.push_back(steps == 0 ? lo : lo * std::pow(10.0, decades * i / steps));
  }
  return out;
}

GridSpec GridSpec::standard(int points_per_decade) {
  GridSpec g;
  g.points_per_decade = points_per_decade;
  g.epsilon = log_grid(1e-5, 1.0, points_per_decade);
  g.gamma = log_grid(0.5e-5, 0.5, points_per_decade);
  return g;
}

void GridSpec::validate() const {
  if (epsilon.empty() || gamma.empty()) throw std::invalid_argument("grids must be non-empty");
  for (double v : epsilon) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("epsilon grid values must be finite and >= 0");
  }
  for (double v : gamma) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("gamma grid values must be finite and >= 0");
  }
}

std::vector<Hyper> GridSpec::candidates(const Method& method) const {
  validate();
  const std::vector<double> zero{0.0};
  const auto& eps = method.robust() ? epsilon : zero;
  const auto& gam = method.lasso() ? gamma : zero;
  std::vector<Hyper> out;
  for (double e : eps) {
    for (double g : gam) out.push_back({e, g});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ModelParams fit_method(const Dataset& train, const Method& method, const Hyper& hyper, const ExperimentConfig& config) {
  const double gamma = method.lasso() ? hyper.gamma : 0.0;
  if (!method.robust()) {
    BaselineConfig b;
    b.gamma = gamma;
    b.coef_bound = config.coef_bound;
    b.solver = config.engine.solver;
    return fit_logistic(train, b).beta;
  }
  DroConfig dro;
  dro.epsilon = hyper.epsilon;
  dro.metric = config.metric;
  dro.metric.kappa = kappa_value(method.kappa, train);
  dro.gamma = gamma;
  dro.coef_bound = config.coef_bound;
  // An iteration or time cap still leaves a usable best-so-far model.
  return run(train, dro, config.engine).beta;
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0 || values[lo] == values[hi]) return values[lo];
  return values[lo] + frac * (values[hi] - values[lo]);
}

CvResult cross_validate(const Dataset& train, const Method& method, const GridSpec& grid, int K, std::uint64_t seed,
                        const ExperimentConfig& config) {
  if (K < 2) throw std::invalid_argument("cross-validation needs K >= 2");
  const std::vector<Hyper> cands = grid.candidates(method);
  const std::vector<Fold> folds = k_folds(train, K, seed);
  const int tasks = static_cast<int>(cands.size()) * K;
  std::vector<double> error(static_cast<std::size_t>(tasks), 0.0);
  std::vector<std::string> failure(static_cast<std::size_t>(tasks));
  const ExperimentConfig sub = inner(config);
  parallel_for(tasks, config.workers, [&](int t) {
    const auto& c = cands[static_cast<std::size_t>(t / K)];
    const auto& f = folds[static_cast<std::size_t>(t % K)];
    try {
      error[static_cast<std::size_t>(t)] = classification_error(fit_method(f.train, method, c, sub), f.validation);
    } catch (const std::exception& e) {
      failure[static_cast<std::size_t>(t)] = e.what();
    }
  });

  CvResult out;
  int best = -1;
  for (std::size_t c = 0; c < cands.size(); ++c) {
    CvCandidate cand;
    cand.hyper = cands[c];
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
      const std::size_t t = c * static_cast<std::size_t>(K) + static_cast<std::size_t>(k);
      if (!failure[t].empty() && !cand.skipped) {
        cand.skipped = true;
        cand.failure = "fold " + std::to_string(k) + ": " + failure[t];
      }
      total += error[t];
    }
    cand.mean_error = total / K;
    // Candidates are sorted ascending, so strict < keeps the smaller value on ties.
    if (!cand.skipped && (best < 0 || cand.mean_error < out.candidates[static_cast<std::size_t>(best)].mean_error)) {
      best = static_cast<int>(c);
    }
    out.candidates.push_back(std::move(cand));
  }
  if (best < 0) {
    throw std::runtime_error("cross-validation: every grid value failed (" + out.candidates.front().failure + ")");
  }
  out.chosen = out.candidates[static_cast<std::size_t>(best)].hyper;
  return out;
}

void BenchmarkConfig::validate() const {
  if (splits < 1) throw std::invalid_argument("need at least one split");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw std::invalid_argument("train fraction must lie in (0, 1)");
  if (folds < 2) throw std::invalid_argument("need at least two folds");
  grid.validate();
}

const MethodReport& BenchmarkReport::find(const Method& method) const {
  for (const auto& r : methods) {
    if (r.method == method) return r;
  }
  throw std::invalid_argument("method not in report: " + method.name());
}

std::string BenchmarkReport::to_json_text() const {
  json j;
  j["dataset"] = dataset;
  j["N"] = N;
  j["n"] = n;
  j["m"] = m;
  j["k"] = k;
  j["seed"] = seed;
  j["seconds"] = round_significant(seconds);
  j["methods"] = json::array();
  for (const auto& r : methods) {
    json mj;
    mj["method"] = r.method.name();
    mj["median_error"] = round_significant(r.median_error);
    mj["splits"] = json::array();
    for (const auto& s : r.splits) {
      mj["splits"].push_back({{"split", s.split},
                              {"error", round_significant(s.error)},
                              {"epsilon", round_significant(s.chosen.epsilon)},
                              {"gamma", round_significant(s.chosen.gamma)},
                              {"seconds", round_significant(s.seconds)}});
    }
    j["methods"].push_back(mj);
  }
  return j.dump(2) + "\n";
}

std::string BenchmarkReport::to_csv() const {
  std::vector<std::vector<std::string>> rows{{"method", "split", "error", "epsilon", "gamma", "seconds"}};
  for (const auto& r : methods) {
    for (const auto& s : r.splits) {
      rows.push_back({r.method.name(), std::to_string(s.split), format_fixed(s.error, 4), num(s.chosen.epsilon),
                      num(s.chosen.gamma), num(s.seconds)});
    }
  }
  return csv_text(rows);
}

BenchmarkReport benchmark(const Dataset& data, const std::vector<Method>& methods, const BenchmarkConfig& bench,
                          std::uint64_t seed, const ExperimentConfig& config, const std::string& name) {
  bench.validate();
  if (methods.empty()) throw std::invalid_argument("no methods requested");
  const auto t0 = Clock::now();
  const int M = static_cast<int>(methods.size());
  const int tasks = bench.splits * M;
  std::vector<SplitResult> results(static_cast<std::size_t>(tasks));
  const ExperimentConfig sub = inner(config);
  parallel_for(tasks, config.workers, [&](int t) {
    const int r = t / M;
    const Method& method = methods[static_cast<std::size_t>(t % M)];
    const auto ts = Clock::now();
    try {
      auto [train, test] = split(data, bench.train_fraction, derive_seed(seed, static_cast<std::uint64_t>(r)));
      if (bench.standardize) {
        const Standardizer st = Standardizer::fit(train);
        train = st.apply(train);
        test = st.apply(test);
      }
      const std::uint64_t cv_seed = derive_seed(seed, 1000003ULL + static_cast<std::uint64_t>(r));
      const CvResult cv = cross_validate(train, method, bench.grid, bench.folds, cv_seed, sub);
      SplitResult& out = results[static_cast<std::size_t>(t)];
      out.split = r;
      out.chosen = cv.chosen;
      out.error = classification_error(fit_method(train, method, cv.chosen, sub), test);
      out.seconds = seconds_since(ts);
    } catch (const std::exception& e) {
      throw std::runtime_error("split " + std::to_string(r) + ", " + method.name() + ": " + e.what());
    }
  });

  BenchmarkReport rep;
  rep.dataset = name;
  rep.N = data.N();
  rep.n = data.n();
  rep.m = data.m();
  rep.k = data.k();
  rep.seed = seed;
  for (int i = 0; i < M; ++i) {
    MethodReport mr;
    mr.method = methods[static_cast<std::size_t>(i)];
    std::vector<double> errs;
    for (int r = 0; r < bench.splits; ++r) {
      mr.splits.push_back(results[static_cast<std::size_t>(r * M + i)]);
      errs.push_back(mr.splits.back().error);
    }
    mr.median_error = median(errs);
    rep.methods.push_back(std::move(mr));
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

const char* to_string(Formulation f) { return f == Formulation::Monolithic ? "monolithic" : "cutting-plane"; }

void RuntimeConfig::validate() const {
  if (N.empty() || m.empty() || formulations.empty()) throw std::invalid_argument("runtime study needs N, m and methods");
  for (int v : N) {
    if (v < 1) throw std::invalid_argument("N must be >= 1");
  }
  for (int v : m) {
    if (v < 1) throw std::invalid_argument("m must be >= 1");
  }
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  if (!(time_cap > 0.0)) throw std::invalid_argument("time cap must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("runtime study needs epsilon > 0");
}

int RuntimeCell::censored() const {
  return static_cast<int>(std::count_if(seconds.begin(), seconds.end(), [](double s) { return !std::isfinite(s); }));
}

double RuntimeCell::median() const { return quantile(seconds, 0.5); }
double RuntimeCell::q10() const { return quantile(seconds, 0.1); }
double RuntimeCell::q90() const { return quantile(seconds, 0.9); }

std::string RuntimeTable::to_csv() const {
  auto stat = [](double v) { return std::isfinite(v) ? num(v) : std::string("CAP"); };
  std::vector<std::vector<std::string>> rows{{"N", "m", "method", "repetitions", "censored", "median", "q10", "q90"}};
  for (const auto& c : cells) {
    rows.push_back({std::to_string(c.N), std::to_string(c.m), to_string(c.formulation),
                    std::to_string(c.seconds.size()), std::to_string(c.censored()), stat(c.median()), stat(c.q10()),
                    stat(c.q90())});
  }
  return csv_text(rows);
}

RuntimeTable runtime_study(const RuntimeConfig& runtime, std::uint64_t seed, const ExperimentConfig& config) {
  runtime.validate();
  constexpr double kCensored = std::numeric_limits<double>::infinity();
  RuntimeTable table;
  std::uint64_t instance = 0;
  // Timed one solve at a time so that measurements do not compete for cores.
  for (int N : runtime.N) {
    for (int m : runtime.m) {
      std::vector<RuntimeCell> cells;
      for (auto f : runtime.formulations) {
        RuntimeCell c;
        c.N = N;
        c.m = m;
        c.formulation = f;
        cells.push_back(c);
      }
      for (int rep = 0; rep < runtime.repetitions; ++rep) {
        const SyntheticInstance inst = generate_synthetic(N, m, derive_seed(seed, instance++));
        DroConfig dro;
        dro.epsilon = runtime.epsilon;
        dro.metric = config.metric;
        dro.coef_bound = config.coef_bound;
        for (auto& c : cells) {
          double secs = kCensored;
          double value = std::numeric_limits<double>::quiet_NaN();
          std::string reason;
          const auto t0 = Clock::now();
          if (c.formulation == Formulation::Monolithic) {
            const std::uint64_t configs = configuration_count(inst.data.cardinalities);
            const double groups = 2.0 * N * static_cast<double>(configs);
            if (groups > static_cast<double>(runtime.group_cap)) {
              reason = "group cap";
            } else {
              SolverConfig sc = config.engine.solver;
              sc.time_limit_seconds = runtime.time_cap;
              const BuiltModel model = build_monolithic(inst.data, dro);
              const SolveResult res = solve(model.program, sc);
              if (res.optimal()) {
                secs = seconds_since(t0);
                value = res.objective;
              } else {
                reason = to_string(res.status);
              }
            }
          } else {
            EngineConfig eng = config.engine;
            eng.time_limit_seconds = runtime.time_cap;
            eng.solver.time_limit_seconds = runtime.time_cap;
            eng.workers = config.workers;
            try {
              const RunResult r = run(inst.data, dro, eng);
              if (r.trace.converged) {
                secs = seconds_since(t0);
                value = r.value();
              } else {
                reason = r.trace.message;
              }
            } catch (const std::exception& e) {
              reason = e.what();
            }
          }
          if (std::isfinite(secs) && secs > runtime.time_cap) {
            secs = kCensored;
            reason = "time cap";
          }
          c.seconds.push_back(secs);
          c.values.push_back(value);
          c.censor_reasons.push_back(reason);
        }
      }
      for (auto& c : cells) table.cells.push_back(std::move(c));
    }
  }
  return table;
}

void StylizedConfig::validate() const {
  if (N.empty()) throw std::invalid_argument("stylized study needs at least one N");
  for (int v : N) {
    if (v < 2) throw std::invalid_argument("stylized N must be >= 2");
  }
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("c must be finite and >= 0");
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
}

Dataset stylized_sample(int N, double beta, std::uint64_t seed) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXi Z(N, 1);
  Eigen::VectorXi y(N);
  for (int i = 0; i < N; ++i) {
    const int z = unif(rng) < 0.5 ? -1 : 1;
    const double p_plus = 1.0 / (1.0 + std::exp(-beta * z));
    Z(i, 0) = z > 0 ? 1 : 0;
    y[i] = unif(rng) < p_plus ? 1 : -1;
  }
  Dataset d = make_dataset(Eigen::MatrixXd(N, 0), std::move(Z), std::move(y), {2});
  d.categorical_names = {"z"};
  d.categories = {{"neg", "pos"}};
  return d;
}

Dataset stylized_numeric(const Dataset& categorical) {
  if (categorical.m() != 1 || categorical.n() != 0 || categorical.cardinalities[0] != 2) {
    throw std::invalid_argument("expected a single binary categorical feature");
  }
  Eigen::MatrixXd X(categorical.N(), 1);
  for (int i = 0; i < categorical.N(); ++i) X(i, 0) = categorical.Z(i, 0) == 1 ? 1.0 : -1.0;
  Dataset d = make_dataset(std::move(X), Eigen::MatrixXi(categorical.N(), 0), categorical.y, {});
  d.numeric_names = {"z"};
  return d;
}

std::vector<StylizedRow> stylized_comparison(const StylizedConfig& stylized, std::uint64_t seed,
                                             const ExperimentConfig& config) {
  stylized.validate();
  const int runs = stylized.runs;
  const int tasks = static_cast<int>(stylized.N.size()) * runs;
  std::vector<double> lr(static_cast<std::size_t>(tasks)), mixed(lr.size()), cont(lr.size());
  const ExperimentConfig sub = inner(config);
  parallel_for(tasks, config.workers, [&](int t) {
    const int N = stylized.N[static_cast<std::size_t>(t / runs)];
    const double eps = stylized.c / std::sqrt(static_cast<double>(N));
    const Dataset cat = stylized_sample(N, stylized.beta, derive_seed(seed, static_cast<std::uint64_t>(t)));
    const auto i = static_cast<std::size_t>(t);

    BaselineConfig b;
    b.coef_bound = sub.coef_bound;
    b.solver = sub.engine.solver;
    lr[i] = fit_logistic(cat, b).beta.beta_cat[0] / 2.0;

    DroConfig dro;
    dro.epsilon = eps;
    dro.metric.p = 1.0;
    dro.metric.kappa = stylized.kappa;
    dro.coef_bound = sub.coef_bound;
    mixed[i] = run(cat, dro, sub.engine).beta.beta_cat[0] / 2.0;

    const BuiltModel model = build_continuous_model(stylized_numeric(cat), eps, stylized.kappa, {0.5});
    const SolveResult res = solve(model.program, sub.engine.solver);
    if (!res.optimal()) throw TrainingError(std::string("continuous model solve failed: ") + to_string(res.status));
    cont[i] = extract_solution(model, res).beta.beta_num[0];
  });

  std::vector<StylizedRow> out;
  for (std::size_t a = 0; a < stylized.N.size(); ++a) {
    StylizedRow row;
    row.N = stylized.N[a];
    row.epsilon = stylized.c / std::sqrt(static_cast<double>(row.N));
    auto slice = [&](const std::vector<double>& v) {
      return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(a * runs),
                                 v.begin() + static_cast<std::ptrdiff_t>((a + 1) * runs));
    };
    row.lr = summarize(slice(lr));
    row.mixed = summarize(slice(mixed));
    row.continuous = summarize(slice(cont));
    out.push_back(std::move(row));
  }
  return out;
}

std::string stylized_csv(const std::vector<StylizedRow>& rows) {
  std::vector<std::vector<std::string>> out{{"N", "epsilon", "model", "mean", "q15", "q85"}};
  for (const auto& r : rows) {
    for (const auto& [name, s] : {std::pair<const char*, const EstimateSummary*>{"lr", &r.lr},
                                  {"mixed", &r.mixed},
                                  {"continuous", &r.continuous}}) {
      out.push_back({std::to_string(r.N), num(r.epsilon), name, num(s->mean), num(s->q15), num(s->q85)});
    }
  }
  return csv_text(out);
}

}  // namespace wdro
