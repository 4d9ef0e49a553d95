#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "wdro/cutgen.hpp"
#include "wdro/data.hpp"
#include "wdro/metric.hpp"
#include "wdro/model.hpp"

namespace wdro {

enum class MethodKind { LR, RegularizedLR, Dro, RegularizedDro };
/// Label weight of the robust methods: 1 or the number m of categorical features.
enum class KappaRule { One, NumFeatures };

struct Method {
  MethodKind kind = MethodKind::LR;
  KappaRule kappa = KappaRule::One;

  bool robust() const { return kind == MethodKind::Dro || kind == MethodKind::RegularizedDro; }
  bool lasso() const { return kind == MethodKind::RegularizedLR || kind == MethodKind::RegularizedDro; }
  /// "LR", "r-LR", "DRO(kappa=1)", "DRO(kappa=m)", "r-DRO(kappa=1)", "r-DRO(kappa=m)".
  std::string name() const;
  /// Accepts name() spellings plus "lr", "rlr", "dro", "dro-m", "rdro", "rdro-m".
  static Method parse(const std::string& text);

  bool operator==(const Method&) const = default;
};

/// LR, r-LR, DRO for both kappa rules, and the two r-DRO variants when requested.
std::vector<Method> table_methods(bool include_regularized_dro = false);

/// kappa = 1, or max(m, 1) so numeric-only data keeps a valid metric.
double kappa_value(KappaRule rule, const Dataset& data);

struct Hyper {
  double epsilon = 0.0;
  double gamma = 0.0;
  auto operator<=>(const Hyper&) const = default;
};

/// {0} (optional) plus points_per_decade log-spaced values per decade in [lo, hi].
std::vector<double> log_grid(double lo, double hi, int points_per_decade, bool with_zero = true);

struct GridSpec {
  std::vector<double> epsilon;
  std::vector<double> gamma;
  int points_per_decade = 1;

  /// epsilon in {0} + [1e-5, 1], gamma in {0} + [0.5e-5, 0.5].
  static GridSpec standard(int points_per_decade = 1);
  void validate() const;
  /// Sorted, de-duplicated candidates a method is tuned over; LR has the single {0, 0}.
  std::vector<Hyper> candidates(const Method& method) const;
};

struct ExperimentConfig {
  /// Norm, weights and p of the ground metric; kappa comes from the method.
  GroundMetricConfig metric;
  EngineConfig engine;
  double coef_bound = 1e4;
  int workers = 1;
};

ModelParams fit_method(const Dataset& train, const Method& method, const Hyper& hyper, const ExperimentConfig& config);

/// Median over a non-empty sample (mean of the middle pair for even sizes).
double median(std::vector<double> values);
/// Linear-interpolation quantile (the common "type 7" rule), q in [0, 1].
double quantile(std::vector<double> values, double q);

struct CvCandidate {
  Hyper hyper;
  double mean_error = 0.0;
  bool skipped = false;
  std::string failure;
};

struct CvResult {
  Hyper chosen;
  std::vector<CvCandidate> candidates;
};

/// Mean validation error per candidate over K folds; the smallest wins and ties
/// go to the smaller epsilon, then the smaller gamma. A candidate whose fit
/// fails in any fold is skipped; if all are skipped this throws.
CvResult cross_validate(const Dataset& train, const Method& method, const GridSpec& grid, int K, std::uint64_t seed,
                        const ExperimentConfig& config);

struct SplitResult {
  int split = 0;
  double error = 0.0;
  Hyper chosen;
  double seconds = 0.0;
};

struct MethodReport {
  Method method;
  std::vector<SplitResult> splits;
  double median_error = 0.0;
};

struct BenchmarkConfig {
  int splits = 20;
  double train_fraction = 0.8;
  int folds = 5;
  GridSpec grid = GridSpec::standard();
  /// z-score numeric columns with statistics of each training split.
  bool standardize = false;

  void validate() const;
};

struct BenchmarkReport {
  std::string dataset;
  int N = 0, n = 0, m = 0, k = 0;
  std::uint64_t seed = 0;
  std::vector<MethodReport> methods;
  double seconds = 0.0;

  const MethodReport& find(const Method& method) const;
  std::string to_json_text() const;
  /// One row per (method, split): method, split, error, epsilon, gamma, seconds.
  std::string to_csv() const;
};

/// Per split: seeded 80/20 split, CV on the training part, refit, test error.
/// Split failures are rethrown with the split index.
BenchmarkReport benchmark(const Dataset& data, const std::vector<Method>& methods, const BenchmarkConfig& bench,
                          std::uint64_t seed, const ExperimentConfig& config, const std::string& name = "data");

enum class Formulation { Monolithic, CuttingPlane };
const char* to_string(Formulation f);

struct RuntimeConfig {
  std::vector<int> N{50};
  std::vector<int> m{6, 8, 10};
  std::vector<Formulation> formulations{Formulation::Monolithic, Formulation::CuttingPlane};
  int repetitions = 5;
  /// Wall-clock cap per solve in seconds; longer runs are censored.
  double time_cap = 600.0;
  double epsilon = 0.1;
  /// Largest monolithic program attempted, in constraint groups 2 N prod_j k_j;
  /// bigger instances are censored without solving.
  std::uint64_t group_cap = std::uint64_t{1} << 20;

  void validate() const;
};

struct RuntimeCell {
  int N = 0;
  int m = 0;
  Formulation formulation = Formulation::Monolithic;
  /// Seconds per repetition; +inf marks a censored repetition.
  std::vector<double> seconds;
  std::vector<double> values;
  std::vector<std::string> censor_reasons;

  int censored() const;
  /// Order statistics treat censored runs as larger than every finished one.
  double median() const;
  double q10() const;
  double q90() const;
};

struct RuntimeTable {
  std::vector<RuntimeCell> cells;
  /// N, m, method, repetitions, censored, median, q10, q90; censored statistics print as CAP.
  std::string to_csv() const;
};

/// Synthetic binary instances (one per repetition, seeded by task) solved with
/// the monolithic program and with column-and-constraint generation.
RuntimeTable runtime_study(const RuntimeConfig& runtime, std::uint64_t seed, const ExperimentConfig& config);

struct StylizedConfig {
  std::vector<int> N{250, 1000, 4000};
  int runs = 100;
  /// epsilon = c / sqrt(N).
  double c = 0.3;
  double beta = 1.0;
  double kappa = 1.0;

  void validate() const;
};

/// Single feature z in {-1, +1} (uniform), P(y | z) = 1 / (1 + exp(-y beta z)).
/// Stored as one categorical feature with categories "neg" (reference) and "pos".
Dataset stylized_sample(int N, double beta, std::uint64_t seed);
/// The same data with z as a numeric column in {-1, +1}.
Dataset stylized_numeric(const Dataset& categorical);

struct EstimateSummary {
  std::vector<double> slopes;
  double mean = 0.0;
  double q15 = 0.0;
  double q85 = 0.0;
  bool band_contains(double value) const { return q15 <= value && value <= q85; }
};

struct StylizedRow {
  int N = 0;
  double epsilon = 0.0;
  EstimateSummary lr;
  EstimateSummary mixed;
  EstimateSummary continuous;
};

/// Slopes on the +-1 scale: half the one-hot slope for the categorical fits,
/// the numeric slope for the continuous model.
std::vector<StylizedRow> stylized_comparison(const StylizedConfig& stylized, std::uint64_t seed,
                                             const ExperimentConfig& config);
std::string stylized_csv(const std::vector<StylizedRow>& rows);

}  // namespace wdro
