#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "wdro/metric.hpp"

using namespace wdro;

namespace {

struct Point {
  std::vector<double> x;
  std::vector<int> z;
  int y;
  DataPoint view() const { return {x, z, y}; }
};

Point random_point(std::mt19937_64& rng, int n, int m) {
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> cat(0, 2), lab(0, 1);
  Point p;
  for (int j = 0; j < n; ++j) p.x.push_back(std::round(g(rng) * 4) / 4);  // repeats happen
  for (int j = 0; j < m; ++j) p.z.push_back(cat(rng));
  p.y = lab(rng) ? 1 : -1;
  return p;
}

}  // namespace

TEST_CASE("categorical distance examples") {
  const std::vector<int> a{0, 1, 2, 0, 1, 2, 0, 1, 2};
  std::vector<int> b = a;
  CHECK(d_categorical(a, b, 1.0) == 0.0);
  b[0] = 1;
  b[4] = 0;
  b[8] = 1;
  CHECK(d_categorical(a, b, 1.0) == 3.0);
  b[5] = 0;
  CHECK(d_categorical(a, b, 2.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(d_categorical(a, std::vector<int>{0}, 1.0), std::invalid_argument);
  CHECK(categorical_distance(8, 3.0) == doctest::Approx(2.0));
}

TEST_CASE("ground distance examples") {
  GroundMetricConfig c;
  c.kappa = 2.5;
  const Point p{{1.0, 2.0}, {0, 1}, 1};
  CHECK(ground_distance(p.view(), p.view(), c) == 0.0);
  Point q = p;
  q.y = -1;
  CHECK(ground_distance(p.view(), q.view(), c) == 2.5);
  c.norm = Norm::L2;
  Point r{{4.0, 6.0}, {0, 1}, 1};
  CHECK(ground_distance(p.view(), r.view(), c) == doctest::Approx(5.0));
  Point bad{{1.0}, {0, 1}, 1};
  CHECK_THROWS_AS(ground_distance(p.view(), bad.view(), c), std::invalid_argument);
}

TEST_CASE("dual norm examples and duality map") {
  const std::vector<double> v{1, -2, 3};
  CHECK(dual_norm(v, Norm::L1) == 3.0);
  CHECK(dual_norm(v, Norm::Linf) == 6.0);
  CHECK(dual_norm(std::vector<double>{3, 4}, Norm::L2) == doctest::Approx(5.0));
  CHECK(dual_norm(std::vector<double>{0, 0}, Norm::L2) == 0.0);
  for (Norm n : {Norm::L1, Norm::L2, Norm::Linf}) CHECK(dual_of(dual_of(n)) == n);
  CHECK(dual_of(Norm::L1) == Norm::Linf);
  // weight 1/2 on one feature: dual is 2|.|
  CHECK(dual_norm(std::vector<double>{0.7}, Norm::L1, std::vector<double>{0.5}) == doctest::Approx(1.4));
}

TEST_CASE("config validation and parsing") {
  GroundMetricConfig c;
  c.validate();
  c.p = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.p = 1.0;
  c.kappa = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.kappa = 1.0;
  c.weights = {1.0, 0.0};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  for (Norm n : {Norm::L1, Norm::L2, Norm::Linf}) CHECK(parse_norm(to_string(n)) == n);
  CHECK_THROWS(parse_norm("L3"));
}

TEST_CASE("metric axioms on random triples") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.3, 3.0);
  for (int trial = 0; trial < 600; ++trial) {
    GroundMetricConfig c;
    c.norm = static_cast<Norm>(trial % 3);
    c.p = 1.0 + (trial % 4) * 0.5;  // p >= 1 keeps the triangle inequality
    c.kappa = u(rng);
    c.weights = {u(rng), u(rng), u(rng)};
    const Point a = random_point(rng, 3, 4), b = random_point(rng, 3, 4), d = random_point(rng, 3, 4);
    const double ab = ground_distance(a.view(), b.view(), c);
    const double ba = ground_distance(b.view(), a.view(), c);
    const double bd = ground_distance(b.view(), d.view(), c);
    const double ad = ground_distance(a.view(), d.view(), c);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-14));
    CHECK(ab >= 0.0);
    CHECK(ground_distance(a.view(), a.view(), c) == 0.0);
    const bool same = a.x == b.x && a.z == b.z && a.y == b.y;
    CHECK((ab == 0.0) == same);
    CHECK(ad <= ab + bd + 1e-12);
    CHECK(d_categorical(a.z, d.z, c.p) <= d_categorical(a.z, b.z, c.p) + d_categorical(b.z, d.z, c.p) + 1e-12);
  }
}

TEST_CASE("Hoelder inequality against the dual norm") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.2, 4.0);
  for (int trial = 0; trial < 3000; ++trial) {
    const Norm norm = static_cast<Norm>(trial % 3);
    const int n = 1 + trial % 5;
    std::vector<double> v(n), w(n), wt;
    for (int j = 0; j < n; ++j) {
      v[j] = g(rng);
      w[j] = g(rng);
    }
    if (trial % 2) {
      for (int j = 0; j < n; ++j) wt.push_back(u(rng));
    }
    double dot = 0.0;
    for (int j = 0; j < n; ++j) dot += v[j] * w[j];
    CHECK(dot <= dual_norm(v, norm, wt) * norm_value(w, norm, wt) + 1e-12);
  }
}

TEST_CASE("dual norm is attained (tightness of Hoelder)") {
  // For the unweighted norms the dual value is the sup over the unit ball; check
  // with the explicit maximizer.
  const std::vector<double> v{0.5, -2.0, 1.5};
  {
    std::vector<double> w{0, -1, 0};  // L1 ball vertex
    double dot = 0;
    for (int j = 0; j < 3; ++j) dot += v[j] * w[j];
    CHECK(dot == doctest::Approx(dual_norm(v, Norm::L1)));
  }
  {
    std::vector<double> w{1, -1, 1};  // Linf ball vertex
    double dot = 0;
    for (int j = 0; j < 3; ++j) dot += v[j] * w[j];
    CHECK(dot == doctest::Approx(dual_norm(v, Norm::Linf)));
  }
}
