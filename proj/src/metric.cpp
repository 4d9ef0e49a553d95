#include "wdro/metric.hpp"

#include <cmath>
#include <stdexcept>

namespace wdro {

const char* to_string(Norm norm) {
  switch (norm) {
    case Norm::L1: return "l1";
    case Norm::L2: return "l2";
    case Norm::Linf: return "linf";
  }
  return "?";
}

Norm parse_norm(const std::string& text) {
  if (text == "l1" || text == "L1") return Norm::L1;
  if (text == "l2" || text == "L2") return Norm::L2;
  if (text == "linf" || text == "Linf" || text == "inf") return Norm::Linf;
  throw std::invalid_argument("unknown norm: " + text);
}

Norm dual_of(Norm norm) {
  switch (norm) {
    case Norm::L1: return Norm::Linf;
    case Norm::L2: return Norm::L2;
    case Norm::Linf: return Norm::L1;
  }
  return norm;
}

void GroundMetricConfig::validate() const {
  if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("metric exponent p must be positive");
  if (!(kappa > 0.0)) throw std::invalid_argument("label weight kappa must be positive");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("norm weights must be positive");
  }
}

namespace {

double weight(std::span<const double> w, std::size_t j) {
  if (w.empty()) return 1.0;
  if (j >= w.size()) throw std::invalid_argument("weight vector shorter than feature vector");
  return w[j];
}

double raw_norm(std::span<const double> v, Norm norm, std::span<const double> w, bool reciprocal) {
  double acc = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double wj = reciprocal ? 1.0 / weight(w, j) : weight(w, j);
    const double a = std::abs(v[j]) * wj;
    switch (norm) {
      case Norm::L1: acc += a; break;
      case Norm::L2: acc += a * a; break;
      case Norm::Linf: acc = std::max(acc, a); break;
    }
  }
  return norm == Norm::L2 ? std::sqrt(acc) : acc;
}

}  // namespace

double norm_value(std::span<const double> v, Norm norm, std::span<const double> weights) {
  return raw_norm(v, norm, weights, false);
}

double dual_norm(std::span<const double> v, Norm norm, std::span<const double> weights) {
  return raw_norm(v, dual_of(norm), weights, true);
}

double categorical_distance(int disagreements, double p) {
  if (disagreements == 0) return 0.0;
  if (p == 1.0) return disagreements;
  return std::pow(static_cast<double>(disagreements), 1.0 / p);
}

double d_categorical(std::span<const int> z, std::span<const int> z2, double p) {
  if (z.size() != z2.size()) throw std::invalid_argument("categorical vectors differ in length");
  int diff = 0;
  for (std::size_t j = 0; j < z.size(); ++j) diff += z[j] != z2[j] ? 1 : 0;
  return categorical_distance(diff, p);
}

double ground_distance(const DataPoint& a, const DataPoint& b, const GroundMetricConfig& config) {
  if (a.x.size() != b.x.size()) throw std::invalid_argument("numeric vectors differ in length");
  std::vector<double> diff(a.x.size());
  for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = a.x[j] - b.x[j];
  return norm_value(diff, config.norm, config.weights) + d_categorical(a.z, b.z, config.p) +
         (a.y != b.y ? config.kappa : 0.0);
}

}  // namespace wdro
