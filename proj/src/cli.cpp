#include "wdro/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "wdro/baselines.hpp"
#include "wdro/benchmark_data.hpp"
#include "wdro/conic_model.hpp"
#include "wdro/cutgen.hpp"
#include "wdro/data.hpp"
#include "wdro/experiments.hpp"
#include "wdro/util.hpp"

namespace wdro {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

// Bad input of any kind (exit 1); everything else is a solver or training failure (exit 2).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Options {
  std::string data, schema, table, out, model;
  std::uint64_t seed = 1;
  int workers = default_workers();
  double epsilon = 0.1;
  double gamma = 0.0;
  double kappa = 1.0;
  std::string norm = "L1";
  double p = 1.0;
  std::vector<double> weights;
  double time_cap = 0.0;  // 0 = none
  std::string method = "dro";
  std::vector<std::string> methods;
  bool rdro = false;
  bool no_label_flip = false;
  bool easing = false;
  int folds = 5;
  int splits = 20;
  double train_fraction = 0.8;
  int points_per_decade = 1;
  int samples = 100;
  int features = 5;
  std::vector<int> sample_list;
  std::vector<int> feature_list;
  std::vector<std::string> formulations;
  int repetitions = 5;
  double group_cap = static_cast<double>(std::uint64_t{1} << 20);
  int runs = 100;
  double c = 0.3;
};

double cap_or_inf(double seconds) { return seconds > 0.0 ? seconds : kInfinity; }

GroundMetricConfig metric_from(const Options& o) {
  GroundMetricConfig m;
  try {
    m.norm = parse_norm(o.norm);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  m.p = o.p;
  m.kappa = o.kappa;
  m.weights = o.weights;
  m.validate();
  return m;
}

ExperimentConfig experiment_from(const Options& o) {
  ExperimentConfig c;
  c.metric = metric_from(o);
  c.workers = std::max(1, o.workers);
  c.engine.workers = 1;
  c.engine.time_limit_seconds = cap_or_inf(o.time_cap);
  c.engine.easing.enabled = o.easing;
  return c;
}

DatasetSchema load_schema(const std::string& path) {
  if (!fs::exists(path)) throw ConfigError("schema file not found: " + path);
  return DatasetSchema::load(path);
}

struct LoadedData {
  Dataset data;
  DatasetSchema schema;
  std::string name;
};

LoadedData load_data(const Options& o) {
  LoadedData out;
  if (!o.table.empty()) {
    const BenchmarkTable t = benchmark_table(o.table);
    std::istringstream in(t.csv);
    out.schema = t.schema;
    out.data = ingest_csv(in, t.schema);
    out.name = t.name;
    return out;
  }
  if (o.data.empty()) throw ConfigError("--data (or --table) is required");
  if (o.schema.empty()) throw ConfigError("--schema is required");
  if (!fs::exists(o.data)) throw ConfigError("data file not found: " + o.data);
  out.schema = load_schema(o.schema);
  out.data = ingest_csv(o.data, out.schema);
  out.name = fs::path(o.data).stem().string();
  return out;
}

// Resolved option values (command line, then config file, then defaults).
json resolved_options(const CLI::App& sub) {
  json j = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      j[name] = r.size() == 1 ? json(r.front()) : json(r);
    } else {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

class Session {
 public:
  Session(const CLI::App& sub, const Options& o) : sub_(sub), o_(o), t0_(Clock::now()) {
    if (o.out.empty()) throw ConfigError("--out is required");
    fs::create_directories(o.out);
  }

  std::string path(const std::string& file) const { return (fs::path(o_.out) / file).string(); }

  void write(const std::string& file, const std::string& content) {
    write_file_atomic(path(file), content);
    artifacts_.push_back(path(file));
  }
  void record(const std::string& file) { artifacts_.push_back(path(file)); }

  void finish() {
    json m;
    m["command"] = sub_.get_name();
    m["tool"] = "wdro";
    m["version"] = kToolVersion;
    m["seed"] = o_.seed;
    m["config"] = resolved_options(sub_);
    // Reusable as --config input.
    m["config_toml"] = "[" + sub_.get_name() + "]\n" + sub_.config_to_str(false, false);
    m["artifacts"] = artifacts_;
    m["wall_seconds"] = round_significant(std::chrono::duration<double>(Clock::now() - t0_).count());
    write_file_atomic(path("manifest.json"), m.dump(2) + "\n");
  }

 private:
  const CLI::App& sub_;
  const Options& o_;
  Clock::time_point t0_;
  std::vector<std::string> artifacts_;
};

std::string model_json(const ModelParams& beta, const FeatureEncoding& enc) {
  json j = json::parse(beta.to_json_text());
  j["encoding"] = json::parse(enc.to_json_text());
  return j.dump(2) + "\n";
}

int cmd_train(const CLI::App& sub, const Options& o, std::ostream& out, std::ostream& err) {
  Session s(sub, o);
  LoadedData ld = load_data(o);
  FeatureEncoding enc = FeatureEncoding::of(ld.data, ld.schema);
  Dataset data = ld.data;
  if (ld.schema.standardize && data.n() > 0) {
    const Standardizer st = Standardizer::fit(data);
    data = st.apply(data);
    enc.mean.assign(st.mean.data(), st.mean.data() + st.mean.size());
    enc.scale.assign(st.scale.data(), st.scale.data() + st.scale.size());
  }

  ModelParams beta;
  SolverConfig solver;
  solver.time_limit_seconds = cap_or_inf(o.time_cap);
  if (o.method == "lr" || o.method == "rlr") {
    BaselineConfig b;
    b.gamma = o.method == "rlr" ? o.gamma : 0.0;
    b.solver = solver;
    b.validate();
    const FitResult f = fit_logistic(data, b);
    if (f.at_cap || f.separable) err << "warning: " << f.diagnostic << "\n";
    beta = f.beta;
  } else if (o.method == "dro") {
    DroConfig dro;
    dro.epsilon = o.epsilon;
    dro.metric = metric_from(o);
    dro.gamma = o.gamma;
    dro.label_flip = !o.no_label_flip;
    dro.validate();
    EngineConfig eng = experiment_from(o).engine;
    eng.workers = std::max(1, o.workers);
    eng.solver = solver;
    const RunResult r = run(data, dro, eng);
    if (!r.trace.converged) err << "warning: " << r.trace.message << "\n";
    if (!r.master.message.empty()) err << "note: " << r.master.message << "\n";
    s.write("trace.csv", r.trace.to_csv());
    beta = r.beta;
  } else if (o.method == "dro-continuous") {
    if (data.m() != 0) throw ConfigError("dro-continuous needs numeric-only data (map categories to numbers first)");
    const GroundMetricConfig metric = metric_from(o);
    if (metric.norm != Norm::L1) throw ConfigError("dro-continuous uses the weighted L1 ground metric");
    if (!(o.epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
    const BuiltModel model = build_continuous_model(data, o.epsilon, metric.kappa, metric.weights);
    const SolveResult res = solve(model.program, solver);
    if (!res.optimal()) throw TrainingError(std::string("continuous model solve failed: ") + to_string(res.status));
    beta = extract_solution(model, res).beta;
  } else {
    throw ConfigError("unknown method: " + o.method);
  }
  s.write("model.json", model_json(beta, enc));
  s.finish();
  out << "model written to " << s.path("model.json") << "\n";
  return 0;
}

int cmd_eval(const Options& o, std::ostream& out) {
  if (o.model.empty() || o.data.empty()) throw ConfigError("eval needs --model and --data");
  if (!fs::exists(o.model)) throw ConfigError("model file not found: " + o.model);
  if (!fs::exists(o.data)) throw ConfigError("data file not found: " + o.data);
  const std::string text = read_file(o.model);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model file is not JSON: ") + e.what());
  }
  if (!j.contains("encoding")) throw ConfigError("model file carries no feature encoding");
  const ModelParams beta = ModelParams::from_json_text(text);
  const FeatureEncoding enc = FeatureEncoding::from_json_text(j["encoding"].dump());
  std::vector<int> card;
  for (const auto& d : enc.categories) card.push_back(static_cast<int>(d.size()));
  if (beta.n() != static_cast<int>(enc.numeric.size()) || beta.cardinalities != card) {
    throw ConfigError("model coefficients do not match its feature encoding");
  }
  const Dataset data = encode_csv(o.data, enc);
  out << format_fixed(classification_error(beta, data), 4) << "\n";
  return 0;
}

int cmd_cv(const CLI::App& sub, const Options& o, std::ostream& out) {
  Session s(sub, o);
  const LoadedData ld = load_data(o);
  const Method method = Method::parse(o.method);
  const GridSpec grid = GridSpec::standard(o.points_per_decade);
  const CvResult cv = cross_validate(ld.data, method, grid, o.folds, o.seed, experiment_from(o));
  std::ostringstream csv;
  write_csv_row(csv, {"epsilon", "gamma", "mean_error", "skipped", "failure"});
  for (const auto& c : cv.candidates) {
    write_csv_row(csv, {std::to_string(c.hyper.epsilon), std::to_string(c.hyper.gamma), format_fixed(c.mean_error, 4),
                        c.skipped ? "1" : "0", c.failure});
  }
  s.write("cv.csv", csv.str());
  json j{{"method", method.name()},
         {"epsilon", round_significant(cv.chosen.epsilon)},
         {"gamma", round_significant(cv.chosen.gamma)}};
  s.write("cv.json", j.dump(2) + "\n");
  s.finish();
  out << method.name() << ": epsilon=" << cv.chosen.epsilon << " gamma=" << cv.chosen.gamma << "\n";
  return 0;
}

int cmd_bench(const CLI::App& sub, const Options& o, std::ostream& out) {
  Session s(sub, o);
  const LoadedData ld = load_data(o);
  std::vector<Method> methods;
  if (o.methods.empty()) {
    methods = table_methods(o.rdro);
  } else {
    for (const auto& m : o.methods) methods.push_back(Method::parse(m));
  }
  BenchmarkConfig bc;
  bc.splits = o.splits;
  bc.folds = o.folds;
  bc.train_fraction = o.train_fraction;
  bc.grid = GridSpec::standard(o.points_per_decade);
  bc.standardize = ld.schema.standardize;
  const BenchmarkReport rep = benchmark(ld.data, methods, bc, o.seed, experiment_from(o), ld.name);
  s.write("report.json", rep.to_json_text());
  s.write("report.csv", rep.to_csv());
  s.finish();
  for (const auto& m : rep.methods) out << m.method.name() << " " << format_fixed(m.median_error, 4) << "\n";
  return 0;
}

int cmd_synth(const CLI::App& sub, const Options& o, std::ostream& out) {
  Session s(sub, o);
  const SyntheticInstance inst = generate_synthetic(o.samples, o.features, o.seed);
  export_synthetic(inst, s.path("synthetic"));
  for (const char* f : {"synthetic.csv", "synthetic.truth.json", "synthetic.schema.json"}) s.record(f);
  s.finish();
  out << "wrote " << s.path("synthetic.csv") << "\n";
  return 0;
}

int cmd_runtime(const CLI::App& sub, const Options& o, std::ostream& out) {
  Session s(sub, o);
  RuntimeConfig rc;
  if (!o.sample_list.empty()) rc.N = o.sample_list;
  if (!o.feature_list.empty()) rc.m = o.feature_list;
  if (!o.formulations.empty()) {
    rc.formulations.clear();
    for (const auto& f : o.formulations) {
      if (f == "monolithic") {
        rc.formulations.push_back(Formulation::Monolithic);
      } else if (f == "cutting-plane") {
        rc.formulations.push_back(Formulation::CuttingPlane);
      } else {
        throw ConfigError("unknown formulation: " + f);
      }
    }
  }
  rc.repetitions = o.repetitions;
  rc.time_cap = o.time_cap > 0.0 ? o.time_cap : 600.0;
  rc.epsilon = o.epsilon;
  if (!(o.group_cap >= 1.0)) throw ConfigError("group cap must be >= 1");
  rc.group_cap = static_cast<std::uint64_t>(o.group_cap);
  ExperimentConfig ec = experiment_from(o);
  ec.engine.time_limit_seconds = kInfinity;
  const RuntimeTable table = runtime_study(rc, o.seed, ec);
  s.write("runtime.csv", table.to_csv());
  std::ostringstream raw;
  write_csv_row(raw, {"N", "m", "method", "repetition", "seconds", "value", "censor_reason"});
  for (const auto& c : table.cells) {
    for (std::size_t r = 0; r < c.seconds.size(); ++r) {
      const bool cap = !std::isfinite(c.seconds[r]);
      std::ostringstream v;
      v.precision(10);
      v << c.values[r];
      write_csv_row(raw, {std::to_string(c.N), std::to_string(c.m), to_string(c.formulation), std::to_string(r),
                          cap ? "CAP" : std::to_string(c.seconds[r]), cap ? "" : v.str(), c.censor_reasons[r]});
    }
  }
  s.write("runtime_raw.csv", raw.str());
  s.finish();
  out << table.to_csv();
  return 0;
}

int cmd_stylized(const CLI::App& sub, const Options& o, std::ostream& out) {
  Session s(sub, o);
  StylizedConfig sc;
  if (!o.sample_list.empty()) sc.N = o.sample_list;
  sc.runs = o.runs;
  sc.c = o.c;
  sc.kappa = o.kappa;
  const auto rows = stylized_comparison(sc, o.seed, experiment_from(o));
  s.write("stylized.csv", stylized_csv(rows));
  s.finish();
  out << stylized_csv(rows);
  return 0;
}

void add_common(CLI::App* sub, Options& o) {
  sub->fallthrough();
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  sub->add_option("--workers", o.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  sub->add_option("--time-cap", o.time_cap, "Time cap in seconds (0 = none)")->capture_default_str();
}

void add_data(CLI::App* sub, Options& o) {
  sub->add_option("--data", o.data, "CSV data file");
  sub->add_option("--schema", o.schema, "Dataset schema (JSON)");
  sub->add_option("--table", o.table, "Built-in benchmark table instead of --data")
      ->check(CLI::IsMember(benchmark_table_names()));
}

void add_metric(CLI::App* sub, Options& o) {
  sub->add_option("--epsilon", o.epsilon, "Wasserstein radius")->capture_default_str();
  sub->add_option("--gamma", o.gamma, "Lasso weight")->capture_default_str();
  sub->add_option("--kappa", o.kappa, "Label weight of the ground metric")->capture_default_str();
  sub->add_option("--norm", o.norm, "Numeric norm")->capture_default_str()->check(CLI::IsMember({"L1", "L2", "Linf"}));
  sub->add_option("--p", o.p, "Categorical exponent")->capture_default_str();
  sub->add_option("--weights", o.weights, "Per-feature numeric norm weights");
  sub->add_flag("--easing", o.easing, "Enable cut easing (every 200 iterations, slack > 0.05)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Wasserstein distributionally robust logistic regression with mixed features", "wdro"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML file; settings of a command go under its [command] table, flags override");
  app.allow_config_extras(CLI::config_extras_mode::error);

  auto* train = app.add_subcommand("train", "Fit a model and write model.json");
  add_common(train, o);
  add_data(train, o);
  add_metric(train, o);
  train->add_option("--method", o.method, "lr | rlr | dro | dro-continuous")
      ->capture_default_str()
      ->check(CLI::IsMember({"lr", "rlr", "dro", "dro-continuous"}));
  train->add_flag("--no-label-flip", o.no_label_flip, "Drop the label-flip constraints (kappa -> infinity)");

  auto* eval = app.add_subcommand("eval", "Print the classification error of a model on a data file");
  eval->fallthrough();
  eval->add_option("--model", o.model, "model.json written by train");
  eval->add_option("--data", o.data, "CSV data file");

  auto* cv = app.add_subcommand("cv", "Cross-validate one method over the hyperparameter grid");
  add_common(cv, o);
  add_data(cv, o);
  add_metric(cv, o);
  cv->add_option("--method", o.method, "lr | rlr | dro | dro-m | rdro | rdro-m")->capture_default_str();
  cv->add_option("--folds", o.folds, "Number of folds")->capture_default_str();
  cv->add_option("--points-per-decade", o.points_per_decade, "Grid density")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Repeated split benchmark with CV-tuned methods");
  add_common(bench, o);
  add_data(bench, o);
  add_metric(bench, o);
  bench->add_option("--methods", o.methods, "Methods (default: LR, r-LR, DRO kappa=1, DRO kappa=m)");
  bench->add_flag("--rdro", o.rdro, "Also run the Lasso-regularized robust variants");
  bench->add_option("--splits", o.splits, "Random train/test splits")->capture_default_str();
  bench->add_option("--folds", o.folds, "CV folds")->capture_default_str();
  bench->add_option("--train-fraction", o.train_fraction, "Training share of each split")->capture_default_str();
  bench->add_option("--points-per-decade", o.points_per_decade, "Grid density")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic binary-feature data set");
  add_common(synth, o);
  synth->add_option("-N,--samples", o.samples, "Number of records")->capture_default_str();
  synth->add_option("-m,--features", o.features, "Number of binary features")->capture_default_str();

  auto* runtime = app.add_subcommand("runtime", "Time monolithic and cutting-plane solves");
  add_common(runtime, o);
  add_metric(runtime, o);
  runtime->add_option("--samples", o.sample_list, "Values of N (default 50)");
  runtime->add_option("--features", o.feature_list, "Values of m (default 6 8 10)");
  runtime->add_option("--formulations", o.formulations, "monolithic and/or cutting-plane");
  runtime->add_option("--repetitions", o.repetitions, "Instances per (N, m)")->capture_default_str();
  runtime->add_option("--group-cap", o.group_cap, "Largest monolithic program, in constraint groups")
      ->capture_default_str();

  auto* stylized = app.add_subcommand("stylized", "Mixed vs continuous robust fits on one +-1 feature");
  add_common(stylized, o);
  stylized->add_option("--samples", o.sample_list, "Values of N (default 250 1000 4000)");
  stylized->add_option("--runs", o.runs, "Runs per N")->capture_default_str();
  stylized->add_option("--c", o.c, "Radius constant, epsilon = c / sqrt(N)")->capture_default_str();
  stylized->add_option("--kappa", o.kappa, "Label weight")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train->parsed()) return cmd_train(*train, o, out, err);
    if (eval->parsed()) return cmd_eval(o, out);
    if (cv->parsed()) return cmd_cv(*cv, o, out);
    if (bench->parsed()) return cmd_bench(*bench, o, out);
    if (synth->parsed()) return cmd_synth(*synth, o, out);
    if (runtime->parsed()) return cmd_runtime(*runtime, o, out);
    if (stylized->parsed()) return cmd_stylized(*stylized, o, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace wdro
