#include <doctest.h>

#include <cmath>
#include <random>

#include "wdro/baselines.hpp"
#include "wdro/conic_model.hpp"

using namespace wdro;

namespace {

Dataset mixed_data(int N, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> c3(0, 2), c2(0, 1);
  Eigen::MatrixXd X(N, 2);
  Eigen::MatrixXi Z(N, 2);
  Eigen::VectorXi y(N);
  for (int i = 0; i < N; ++i) {
    X(i, 0) = g(rng);
    X(i, 1) = g(rng);
    Z(i, 0) = c3(rng);
    Z(i, 1) = c2(rng);
    const double s = 0.3 + X(i, 0) - 0.5 * X(i, 1) + (Z(i, 0) == 2 ? 1.0 : 0.0) - 0.7 * Z(i, 1);
    y(i) = std::uniform_real_distribution<double>(0, 1)(rng) < 1 / (1 + std::exp(-s)) ? 1 : -1;
  }
  return make_dataset(X, Z, y, {3, 2});
}

double objective(const ModelParams& b, const Dataset& d, double gamma) {
  return empirical_log_loss(b, d) + gamma * (b.beta_num.lpNorm<1>() + b.beta_cat.lpNorm<1>());
}

double l1(const ModelParams& b) { return b.beta_num.lpNorm<1>() + b.beta_cat.lpNorm<1>(); }

}  // namespace

TEST_CASE("single positive point is separable: diagnostic raised") {
  Eigen::MatrixXd X(1, 0);
  Eigen::MatrixXi Z(1, 0);
  Eigen::VectorXi y(1);
  y << 1;
  const FitResult f = fit_logistic(make_dataset(X, Z, y, {}));
  CHECK(f.separable);
  CHECK(!f.diagnostic.empty());
  CHECK(f.beta.beta0 > 10.0);
  CHECK(f.beta.beta0 <= 1e4);
  // a tighter cap is reached exactly
  BaselineConfig c;
  c.coef_bound = 5.0;
  const FitResult g = fit_logistic(make_dataset(X, Z, y, {}), c);
  CHECK(g.at_cap);
  CHECK(g.beta.beta0 == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("overlapping classes are not flagged separable") {
  const Dataset d = mixed_data(80, 3);
  const FitResult f = fit_logistic(d);
  CHECK(!f.separable);
  CHECK(!f.at_cap);
}

TEST_CASE("symmetric data gives a zero intercept") {
  Eigen::MatrixXd X(4, 1);
  X << 1.0, 2.0, -1.0, -2.0;
  Eigen::MatrixXi Z(4, 0);
  Eigen::VectorXi y(4);
  y << 1, -1, -1, 1;
  const ModelParams b = train_lr(make_dataset(X, Z, y, {}));
  CHECK(std::abs(b.beta0) < 1e-6);
}

TEST_CASE("LR beats beta = 0 and satisfies first-order optimality") {
  const Dataset d = mixed_data(80, 3);
  const ModelParams b = train_lr(d);
  CHECK(empirical_log_loss(b, d) <= std::log(2.0) + 1e-12);
  // central finite differences of the smooth objective vanish at the optimum
  const double h = 1e-5;
  auto probe = [&](auto set) {
    ModelParams p = b, m = b;
    set(p, h);
    set(m, -h);
    return (empirical_log_loss(p, d) - empirical_log_loss(m, d)) / (2 * h);
  };
  CHECK(std::abs(probe([](ModelParams& q, double t) { q.beta0 += t; })) < 1e-4);
  for (int j = 0; j < d.n(); ++j) CHECK(std::abs(probe([j](ModelParams& q, double t) { q.beta_num(j) += t; })) < 1e-4);
  for (int j = 0; j < d.k(); ++j) CHECK(std::abs(probe([j](ModelParams& q, double t) { q.beta_cat(j) += t; })) < 1e-4);
}

TEST_CASE("r-LR with gamma = 0 equals LR") {
  const Dataset d = mixed_data(60, 5);
  const ModelParams a = train_lr(d);
  const ModelParams b = train_regularized_lr(d, 0.0);
  CHECK(std::abs(a.beta0 - b.beta0) < 1e-6);
  CHECK((a.beta_num - b.beta_num).lpNorm<Eigen::Infinity>() < 1e-6);
  CHECK((a.beta_cat - b.beta_cat).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("r-LR subgradient optimality") {
  const Dataset d = mixed_data(100, 8);
  const double gamma = 0.02;
  const ModelParams b = train_regularized_lr(d, gamma);
  const double h = 1e-5;
  auto grad = [&](auto set) {
    ModelParams p = b, m = b;
    set(p, h);
    set(m, -h);
    return (empirical_log_loss(p, d) - empirical_log_loss(m, d)) / (2 * h);
  };
  auto check = [&](double coef, double g) {
    if (std::abs(coef) > 1e-6) {
      CHECK(std::abs(g + gamma * (coef > 0 ? 1 : -1)) < 1e-4);
    } else {
      CHECK(std::abs(g) <= gamma + 1e-4);
    }
  };
  CHECK(std::abs(grad([](ModelParams& q, double t) { q.beta0 += t; })) < 1e-4);
  for (int j = 0; j < d.n(); ++j) check(b.beta_num(j), grad([j](ModelParams& q, double t) { q.beta_num(j) += t; }));
  for (int j = 0; j < d.k(); ++j) check(b.beta_cat(j), grad([j](ModelParams& q, double t) { q.beta_cat(j) += t; }));
  // objective no worse than nearby perturbations
  ModelParams q = b;
  q.beta_num(0) *= 0.9;
  CHECK(objective(b, d, gamma) <= objective(q, d, gamma) + 1e-9);
}

TEST_CASE("large gamma leaves the intercept at the base-rate log-odds") {
  const Dataset d = mixed_data(90, 9);
  const ModelParams b = train_regularized_lr(d, 10.0);
  CHECK(l1(b) < 1e-6);
  const double pos = (d.y.array() == 1).count();
  CHECK(b.beta0 == doctest::Approx(std::log(pos / (d.N() - pos))).epsilon(1e-5));
}

TEST_CASE("regularization path: l1 norm non-increasing in gamma") {
  const Dataset d = mixed_data(120, 12);
  double prev = kInfinity;
  for (double gamma : {0.0, 1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3}) {
    const double v = l1(train_regularized_lr(d, gamma));
    CHECK(v <= prev + 1e-6);
    prev = v;
  }
}

TEST_CASE("prediction rule and error rate") {
  ModelParams b = ModelParams::zeros(1, {});
  const std::vector<double> x0{0.0};
  const std::vector<int> none;
  auto p = predict(b, x0, none);
  CHECK(p.label == 1);
  CHECK(p.probability == doctest::Approx(0.5));
  b.beta0 = std::log(3.0);
  CHECK(predict(b, x0, none).probability == doctest::Approx(0.75));
  // label invariant under positive rescaling
  const Dataset d = mixed_data(50, 1);
  const ModelParams fit = train_lr(d);
  ModelParams scaled = fit;
  scaled.beta0 *= 3.7;
  scaled.beta_num *= 3.7;
  scaled.beta_cat *= 3.7;
  for (int i = 0; i < d.N(); ++i) {
    const std::vector<double> x{d.X(i, 0), d.X(i, 1)};
    const auto z = d.categorical_row(i);
    CHECK(predict(fit, x, z).label == predict(scaled, x, z).label);
  }
}

TEST_CASE("classification error examples") {
  Eigen::MatrixXd X(10, 1);
  Eigen::MatrixXi Z(10, 0);
  Eigen::VectorXi y(10);
  for (int i = 0; i < 10; ++i) {
    X(i, 0) = i < 3 ? -1.0 : 1.0;
    y(i) = i < 3 ? -1 : 1;
  }
  const Dataset d = make_dataset(X, Z, y, {});
  ModelParams b = ModelParams::zeros(1, {});
  CHECK(classification_error(b, d) == doctest::Approx(0.3));  // constant +1
  b.beta_num << 1.0;
  CHECK(classification_error(b, d) == 0.0);
}

TEST_CASE("invalid baseline configs") {
  BaselineConfig c;
  c.gamma = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
