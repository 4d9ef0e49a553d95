#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "tests_support.hpp"
#include "wdro/baselines.hpp"
#include "wdro/experiments.hpp"

using namespace wdro;
using namespace wdro::testing;

namespace {

// Feature 0 copies the label; the rest is noise.
Dataset label_copy(int N, std::uint64_t seed) {
  Dataset d = random_mixed(N, 0, {2, 3}, seed);
  for (int i = 0; i < N; ++i) d.Z(i, 0) = d.y(i) == 1 ? 1 : 0;
  d.validate();
  return d;
}

GridSpec small_grid() {
  GridSpec g;
  g.epsilon = {0.0, 0.01, 0.1};
  g.gamma = {0.0, 0.01};
  return g;
}

}  // namespace

TEST_CASE("method names and parsing") {
  for (const Method& m : table_methods(true)) CHECK(Method::parse(m.name()) == m);
  CHECK(table_methods().size() == 4);
  CHECK(table_methods(true).size() == 6);
  CHECK(Method::parse("dro-m").kappa == KappaRule::NumFeatures);
  CHECK(Method::parse("rlr").kind == MethodKind::RegularizedLR);
  CHECK_THROWS_AS(Method::parse("svm"), std::invalid_argument);
  const Dataset d = random_mixed(4, 1, {2, 2, 3}, 1);
  CHECK(kappa_value(KappaRule::One, d) == 1.0);
  CHECK(kappa_value(KappaRule::NumFeatures, d) == 3.0);
  CHECK(kappa_value(KappaRule::NumFeatures, random_mixed(4, 2, {}, 1)) == 1.0);
}

TEST_CASE("standard grids") {
  const GridSpec g = GridSpec::standard();
  REQUIRE(g.epsilon.size() == 7);
  CHECK(g.epsilon.front() == 0.0);
  CHECK(g.epsilon[1] == doctest::Approx(1e-5));
  CHECK(g.epsilon.back() == doctest::Approx(1.0));
  CHECK(g.gamma[1] == doctest::Approx(0.5e-5));
  CHECK(g.gamma.back() == doctest::Approx(0.5));
  CHECK(GridSpec::standard(2).epsilon.size() == 12);
  CHECK(g.candidates(Method::parse("lr")) == std::vector<Hyper>{{0.0, 0.0}});
  CHECK(g.candidates(Method::parse("dro")).size() == 7);
  CHECK(g.candidates(Method::parse("rdro")).size() == 49);
  GridSpec dup;
  dup.epsilon = {0.1, 0.1, 0.0};
  dup.gamma = {0.0};
  CHECK(dup.candidates(Method::parse("dro")) == std::vector<Hyper>{{0.0, 0.0}, {0.1, 0.0}});
  dup.epsilon = {-1.0};
  CHECK_THROWS_AS(dup.validate(), std::invalid_argument);
}

TEST_CASE("median and quantiles") {
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  CHECK(quantile({1, 2, 3, 4, 5}, 0.1) == doctest::Approx(1.4));
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(quantile({1, 2, inf}, 0.5) == 2.0);
  CHECK(std::isinf(quantile({1, inf, inf}, 0.5)));
  CHECK_THROWS(median({}));
}

TEST_CASE("cross-validation: single value, duplicates and ties") {
  const Dataset d = generate_synthetic(40, 3, 5).data;
  ExperimentConfig cfg;
  GridSpec one;
  one.epsilon = {0.05};
  one.gamma = {0.0};
  const Method dro = Method::parse("dro");
  CHECK(cross_validate(d, dro, one, 4, 1, cfg).chosen.epsilon == 0.05);
  GridSpec dup = one;
  dup.epsilon = {0.05, 0.05};
  const CvResult r = cross_validate(d, dro, dup, 4, 1, cfg);
  CHECK(r.candidates.size() == 1);
  CHECK(r.chosen.epsilon == 0.05);
  // every epsilon separates a label-copy feature perfectly: the tie goes to the smallest
  GridSpec ties;
  ties.epsilon = {0.001, 0.0001, 0.01};
  ties.gamma = {0.0};
  const CvResult t = cross_validate(label_copy(30, 2), dro, ties, 3, 4, cfg);
  for (const auto& c : t.candidates) CHECK(c.mean_error == 0.0);
  CHECK(t.chosen.epsilon == 0.0001);
  CHECK_THROWS_AS(cross_validate(d, dro, one, 1, 1, cfg), std::invalid_argument);
}

TEST_CASE("cross-validation is independent of the worker count") {
  const Dataset d = generate_synthetic(40, 4, 8).data;
  ExperimentConfig a, b;
  b.workers = 3;
  const Method m = Method::parse("rlr");
  const CvResult ra = cross_validate(d, m, small_grid(), 4, 9, a);
  const CvResult rb = cross_validate(d, m, small_grid(), 4, 9, b);
  REQUIRE(ra.candidates.size() == rb.candidates.size());
  for (std::size_t i = 0; i < ra.candidates.size(); ++i) CHECK(ra.candidates[i].mean_error == rb.candidates[i].mean_error);
  CHECK(ra.chosen == rb.chosen);
}

TEST_CASE("small-N synthetic data usually picks a nonzero radius") {
  int nonzero = 0;
  const int seeds = 7;
  for (int s = 0; s < seeds; ++s) {
    const Dataset d = generate_synthetic(30, 6, 100 + static_cast<std::uint64_t>(s)).data;
    const CvResult r = cross_validate(d, Method::parse("dro"), GridSpec::standard(), 5, 7, ExperimentConfig{});
    CHECK(std::isfinite(r.chosen.epsilon));
    nonzero += r.chosen.epsilon > 0.0;
  }
  MESSAGE("nonzero radius chosen for " << nonzero << " of " << seeds << " seeds");
  CHECK(nonzero * 2 > seeds);
}

TEST_CASE("benchmark: reproducible, recomputable medians, perfect predictor") {
  const Dataset d = label_copy(40, 3);
  BenchmarkConfig bc;
  bc.splits = 3;
  bc.folds = 3;
  bc.grid = small_grid();
  ExperimentConfig cfg;
  const auto methods = table_methods(true);
  const BenchmarkReport a = benchmark(d, methods, bc, 11, cfg, "copy");
  cfg.workers = 2;
  const BenchmarkReport b = benchmark(d, methods, bc, 11, cfg, "copy");
  for (const auto& mr : a.methods) {
    CHECK(mr.median_error == 0.0);
    REQUIRE(mr.splits.size() == 3);
    std::vector<double> errs;
    for (const auto& s : mr.splits) errs.push_back(s.error);
    CHECK(mr.median_error == median(errs));
    const MethodReport& other = b.find(mr.method);
    for (std::size_t r = 0; r < 3; ++r) {
      CHECK(other.splits[r].error == mr.splits[r].error);
      CHECK(other.splits[r].chosen == mr.splits[r].chosen);
    }
  }
  std::istringstream csv(a.to_csv());
  CHECK(read_csv(csv).size() == 1 + methods.size() * 3);
  CHECK(a.to_json_text().find("\"median_error\"") != std::string::npos);
  bc.splits = 0;
  CHECK_THROWS_AS(benchmark(d, methods, bc, 1, cfg), std::invalid_argument);
}

TEST_CASE("runtime study: monolithic and cutting plane agree, oversized programs are censored") {
  RuntimeConfig rc;
  rc.N = {12};
  rc.m = {3, 5};
  rc.repetitions = 2;
  rc.group_cap = 2 * 12 * 8;  // m = 5 does not fit
  const RuntimeTable t = runtime_study(rc, 3, ExperimentConfig{});
  REQUIRE(t.cells.size() == 4);
  for (const auto& c : t.cells) {
    if (c.m == 5 && c.formulation == Formulation::Monolithic) {
      CHECK(c.censored() == 2);
      CHECK(std::isinf(c.median()));
    } else {
      CHECK(c.censored() == 0);
    }
  }
  for (std::size_t r = 0; r < 2; ++r) {
    CHECK(t.cells[0].values[r] == doctest::Approx(t.cells[1].values[r]).epsilon(1e-6));
  }
  const std::string csv = t.to_csv();
  CHECK(csv.find("CAP") != std::string::npos);
  CHECK(csv.rfind("N,m,method", 0) == 0);
}

TEST_CASE("stylized sample and the +-1 recoding") {
  const Dataset cat = stylized_sample(400, 1.0, 5);
  CHECK(cat.m() == 1);
  CHECK(cat.categories[0] == std::vector<std::string>{"neg", "pos"});
  const Dataset num = stylized_numeric(cat);
  CHECK(num.n() == 1);
  CHECK(num.m() == 0);
  for (int i = 0; i < cat.N(); ++i) CHECK(num.X(i, 0) == (cat.Z(i, 0) == 1 ? 1.0 : -1.0));
  // the 0/1 slope is twice the +-1 slope
  const double slope01 = train_lr(cat).beta_cat(0);
  const double slope_pm = train_lr(num).beta_num(0);
  CHECK(slope_pm == doctest::Approx(slope01 / 2).epsilon(1e-6));
}

TEST_CASE("stylized comparison at zero radius: all three estimators coincide") {
  StylizedConfig sc;
  sc.N = {200};
  sc.runs = 3;
  sc.c = 0.0;
  const auto rows = stylized_comparison(sc, 4, ExperimentConfig{});
  REQUIRE(rows.size() == 1);
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(rows[0].mixed.slopes[r] == doctest::Approx(rows[0].lr.slopes[r]).epsilon(1e-5));
    CHECK(rows[0].continuous.slopes[r] == doctest::Approx(rows[0].lr.slopes[r]).epsilon(1e-5));
  }
}

TEST_CASE("stylized comparison shrinks the continuous model more") {
  StylizedConfig sc;
  sc.N = {250};
  sc.runs = 20;
  const auto rows = stylized_comparison(sc, 6, ExperimentConfig{});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].epsilon == doctest::Approx(0.3 / std::sqrt(250.0)));
  CHECK(rows[0].continuous.mean < rows[0].mixed.mean);
  CHECK(rows[0].mixed.mean < rows[0].lr.mean);
  std::istringstream csv(stylized_csv(rows));
  CHECK(read_csv(csv).size() == 4);
}

TEST_CASE("experiments are pure functions of the seed") {
  StylizedConfig sc;
  sc.N = {100};
  sc.runs = 4;
  ExperimentConfig a, b;
  b.workers = 2;
  const auto r1 = stylized_comparison(sc, 9, a);
  const auto r2 = stylized_comparison(sc, 9, b);
  CHECK(r1[0].mixed.slopes == r2[0].mixed.slopes);
  CHECK(r1[0].continuous.slopes == r2[0].continuous.slopes);
}
