#include <json.hpp>
#include <numeric>
#include <stdexcept>

#include "wdro/model.hpp"
#include "wdro/util.hpp"

namespace wdro {

using nlohmann::json;

ModelParams ModelParams::zeros(int n, std::vector<int> cardinalities) {
  ModelParams b;
  b.beta_num = Eigen::VectorXd::Zero(n);
  int k = 0;
  for (int c : cardinalities) k += c - 1;
  b.beta_cat = Eigen::VectorXd::Zero(k);
  b.cardinalities = std::move(cardinalities);
  return b;
}

std::vector<int> ModelParams::block_offsets() const {
  std::vector<int> off(cardinalities.size(), 0);
  for (std::size_t j = 1; j < cardinalities.size(); ++j) off[j] = off[j - 1] + cardinalities[j - 1] - 1;
  return off;
}

double ModelParams::category_slope(int j, int index) const {
  if (index == 0) return 0.0;
  int off = 0;
  for (int q = 0; q < j; ++q) off += cardinalities[static_cast<std::size_t>(q)] - 1;
  return beta_cat[off + index - 1];
}

double ModelParams::score(std::span<const double> x, std::span<const int> z) const {
  if (static_cast<int>(x.size()) != n() || static_cast<int>(z.size()) != m()) {
    throw std::invalid_argument("feature dimensions do not match the model");
  }
  double s = beta0;
  for (int j = 0; j < n(); ++j) s += beta_num[j] * x[static_cast<std::size_t>(j)];
  int off = 0;
  for (int j = 0; j < m(); ++j) {
    const int kj = cardinalities[static_cast<std::size_t>(j)];
    const int t = z[static_cast<std::size_t>(j)];
    if (t < 0 || t >= kj) throw std::invalid_argument("category index out of range");
    if (t > 0) s += beta_cat[off + t - 1];
    off += kj - 1;
  }
  return s;
}

std::string ModelParams::to_json_text() const {
  json j;
  j["beta0"] = round_significant(beta0);
  j["beta_num"] = json::array();
  for (int q = 0; q < n(); ++q) j["beta_num"].push_back(round_significant(beta_num[q]));
  j["beta_cat"] = json::array();
  int off = 0;
  for (int c : cardinalities) {
    json block = json::array();
    for (int t = 0; t < c - 1; ++t) block.push_back(round_significant(beta_cat[off + t]));
    j["beta_cat"].push_back(block);
    off += c - 1;
  }
  j["cardinalities"] = cardinalities;
  return j.dump(2) + "\n";
}

ModelParams ModelParams::from_json_text(const std::string& text) {
  ModelParams b;
  try {
    const json j = json::parse(text);
    b.beta0 = j.at("beta0").get<double>();
    const auto num = j.at("beta_num").get<std::vector<double>>();
    b.beta_num = Eigen::Map<const Eigen::VectorXd>(num.data(), static_cast<Eigen::Index>(num.size()));
    const auto blocks = j.at("beta_cat").get<std::vector<std::vector<double>>>();
    std::vector<double> flat;
    for (const auto& blk : blocks) {
      b.cardinalities.push_back(static_cast<int>(blk.size()) + 1);
      flat.insert(flat.end(), blk.begin(), blk.end());
    }
    if (j.contains("cardinalities") && j["cardinalities"].get<std::vector<int>>() != b.cardinalities) {
      throw std::invalid_argument("cardinalities disagree with beta_cat blocks");
    }
    b.beta_cat = Eigen::Map<const Eigen::VectorXd>(flat.data(), static_cast<Eigen::Index>(flat.size()));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed model JSON: ") + e.what());
  }
  return b;
}

void ModelParams::save(const std::string& path) const { write_file_atomic(path, to_json_text()); }

ModelParams ModelParams::load(const std::string& path) { return from_json_text(read_file(path)); }

}  // namespace wdro
