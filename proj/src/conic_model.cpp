#include "wdro/conic_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wdro {

double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

std::uint64_t configuration_count(std::span<const int> cardinalities) {
  std::uint64_t total = 1;
  for (int c : cardinalities) {
    const auto k = static_cast<std::uint64_t>(c);
    if (total > std::numeric_limits<std::uint64_t>::max() / k) return std::numeric_limits<std::uint64_t>::max();
    total *= k;
  }
  return total;
}

void DroConfig::validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be finite and >= 0");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  if (!(lambda_max > 0.0)) throw std::invalid_argument("lambda_max must be positive");
  if (!(coef_bound > 0.0)) throw std::invalid_argument("coef_bound must be positive");
  metric.validate();
}

SoftplusHandles softplus_epigraph(ConicProgram& program, const AffineExpr& c, const AffineExpr& a) {
  const int u = program.add_variable();
  const int v = program.add_variable();
  const int row = program.add_row(AffineExpr::variable(u) + AffineExpr::variable(v) - AffineExpr(1.0),
                                  RowSense::LessEqual);
  program.add_exp_cone(AffineExpr::variable(u), AffineExpr(1.0), -a);
  program.add_exp_cone(AffineExpr::variable(v), AffineExpr(1.0), c - a);
  return {u, v, row};
}

namespace {

constexpr double kLog3 = 1.0986122886681098;

// Shared construction for the robust programs and the empirical-risk program.
class Builder {
 public:
  Builder(const Dataset& data, const ModelParams* fixed) : d_(data), fixed_(fixed), off_(data.block_offsets()) {
    if (fixed_ && (fixed_->n() != d_.n() || fixed_->cardinalities != d_.cardinalities)) {
      throw std::invalid_argument("fixed coefficients do not match the data dimensions");
    }
    out_.layout.cardinalities = d_.cardinalities;
  }

  void add_beta(double bound) {
    auto add = [&](const std::string& name, double fixed_value) {
      const int j = fixed_ ? var(name, fixed_value, fixed_value, fixed_value) : var(name, -bound, bound, 0.0);
      return j;
    };
    auto& L = out_.layout;
    L.beta0 = add("beta0", fixed_ ? fixed_->beta0 : 0.0);
    for (int j = 0; j < d_.n(); ++j) {
      L.beta_num.push_back(add("bN" + std::to_string(j), fixed_ ? fixed_->beta_num[j] : 0.0));
    }
    for (int j = 0; j < d_.k(); ++j) {
      L.beta_cat.push_back(add("bC" + std::to_string(j), fixed_ ? fixed_->beta_cat[j] : 0.0));
    }
  }

  // lambda >= ||beta_N||_* encoded per norm.
  void add_lambda(const DroConfig& cfg) {
    auto& L = out_.layout;
    auto& P = out_.program;
    const auto& w = cfg.metric.weights;
    if (!w.empty() && static_cast<int>(w.size()) != d_.n()) {
      throw std::invalid_argument("metric weights must match the numeric dimension");
    }
    auto weight = [&](int j) { return w.empty() ? 1.0 : w[static_cast<std::size_t>(j)]; };
    std::vector<double> bn(static_cast<std::size_t>(d_.n()));
    for (int j = 0; j < d_.n(); ++j) bn[static_cast<std::size_t>(j)] = x0_[static_cast<std::size_t>(L.beta_num[j])];
    const double lam0 = std::min(dual_norm(bn, cfg.metric.norm, w) + 1.0 + d_.n(), 0.5 * cfg.lambda_max);
    L.lambda = var("lambda", 0.0, cfg.lambda_max, lam0);
    L.lambda_max = cfg.lambda_max;
    const AffineExpr lam = AffineExpr::variable(L.lambda);
    switch (cfg.metric.norm) {
      case Norm::L1:  // dual Linf: |b_j| / w_j <= lambda
        for (int j = 0; j < d_.n(); ++j) {
          const AffineExpr b = AffineExpr::variable(L.beta_num[j], 1.0 / weight(j));
          P.add_row(b - lam, RowSense::LessEqual);
          P.add_row(-b - lam, RowSense::LessEqual);
        }
        break;
      case Norm::Linf: {  // dual L1: sum_j t_j <= lambda, t_j >= |b_j| / w_j
        AffineExpr sum;
        for (int j = 0; j < d_.n(); ++j) {
          const double bj = bn[static_cast<std::size_t>(j)] / weight(j);
          const int t = var("dn" + std::to_string(j), 0.0, kInfinity, std::abs(bj) + 1.0 / (2.0 * d_.n() + 2.0));
          const AffineExpr b = AffineExpr::variable(L.beta_num[j], 1.0 / weight(j));
          P.add_row(b - AffineExpr::variable(t), RowSense::LessEqual);
          P.add_row(-b - AffineExpr::variable(t), RowSense::LessEqual);
          sum.add(t, 1.0);
        }
        if (d_.n() > 0) P.add_row(sum - lam, RowSense::LessEqual);
        break;
      }
      case Norm::L2: {
        if (d_.n() == 0) break;
        std::vector<AffineExpr> xs;
        for (int j = 0; j < d_.n(); ++j) xs.push_back(AffineExpr::variable(L.beta_num[j], 1.0 / weight(j)));
        P.add_second_order_cone(lam, std::move(xs));
        break;
      }
    }
  }

  void add_lasso(double gamma, bool intercept = false) {
    if (gamma <= 0.0 || fixed_) return;
    auto& L = out_.layout;
    auto penalize = [&](int b) {
      const int t = var("", 0.0, kInfinity, std::abs(x0_[static_cast<std::size_t>(b)]) + 1.0);
      out_.program.add_row(AffineExpr::variable(b) - AffineExpr::variable(t), RowSense::LessEqual);
      out_.program.add_row(-AffineExpr::variable(b) - AffineExpr::variable(t), RowSense::LessEqual);
      out_.program.add_to_objective(t, gamma);
      L.lasso.push_back(t);
    };
    if (intercept) penalize(L.beta0);
    for (int b : L.beta_num) penalize(b);
    for (int b : L.beta_cat) penalize(b);
  }

  AffineExpr score(int i, std::span<const int> z) const {
    const auto& L = out_.layout;
    AffineExpr e = AffineExpr::variable(L.beta0);
    for (int j = 0; j < d_.n(); ++j) e.add(L.beta_num[j], d_.X(i, j));
    for (int j = 0; j < d_.m(); ++j) {
      const int t = z[static_cast<std::size_t>(j)];
      if (t > 0) e.add(L.beta_cat[off_[static_cast<std::size_t>(j)] + t - 1], 1.0);
    }
    return e;
  }

  double score_at_start(int i, std::span<const int> z) const { return score(i, z).evaluate(x0_); }

  // s_i hints: the start has u = v = 1/3, which needs a > max(theta, 0) + log 3.
  void add_s(const std::vector<double>& need) {
    auto& L = out_.layout;
    for (int i = 0; i < d_.N(); ++i) {
      L.s.push_back(var("s" + std::to_string(i), 0.0, kInfinity, need[static_cast<std::size_t>(i)] + kLog3 + 1.0));
    }
  }

  void add_cut(const CutKey& key, Family family, double dist, double kappa) {
    auto& L = out_.layout;
    const double sign = family == Family::Plus ? -d_.y[key.i] : d_.y[key.i];
    AffineExpr theta = score(key.i, key.z);
    theta *= sign;
    AffineExpr a = AffineExpr::variable(L.s[static_cast<std::size_t>(key.i)]);
    if (L.lambda >= 0) {
      const double coef = dist + (family == Family::Minus ? kappa : 0.0);
      if (coef != 0.0) a.add(L.lambda, coef);
    }
    const auto h = softplus_epigraph(out_.program, theta, a);
    x0_.push_back(1.0 / 3.0);
    x0_.push_back(1.0 / 3.0);
    L.cuts.push_back({key, family, h.u, h.v, h.row});
  }

  BuiltModel finish(const AffineExpr& objective_extra) {
    auto& P = out_.program;
    AffineExpr obj = objective_extra;
    obj += P.objective();
    for (int s : out_.layout.s) obj.add(s, 1.0 / d_.N());
    obj.compress();
    P.set_objective(std::move(obj));
    P.set_initial_point(x0_);
    return std::move(out_);
  }

  int lambda() const { return out_.layout.lambda; }

 private:
  int var(const std::string& name, double lo, double hi, double start) {
    x0_.push_back(start);
    return out_.program.add_variable(name, lo, hi);
  }

  const Dataset& d_;
  const ModelParams* fixed_;
  std::vector<int> off_;
  BuiltModel out_;
  std::vector<double> x0_;
};

struct KeyedCut {
  const CutKey* key;
  Family family;
};

void check_key(const Dataset& data, const CutKey& key) {
  if (key.i < 0 || key.i >= data.N()) throw std::invalid_argument("cut references a row outside the data");
  if (static_cast<int>(key.z.size()) != data.m()) throw std::invalid_argument("cut has wrong categorical length");
  for (int j = 0; j < data.m(); ++j) {
    if (key.z[static_cast<std::size_t>(j)] < 0 || key.z[static_cast<std::size_t>(j)] >= data.cardinalities[static_cast<std::size_t>(j)]) {
      throw std::invalid_argument("cut has an invalid category index");
    }
  }
}

int disagreements(const Dataset& data, const CutKey& key) {
  int diff = 0;
  for (int j = 0; j < data.m(); ++j) diff += key.z[static_cast<std::size_t>(j)] != data.Z(key.i, j) ? 1 : 0;
  return diff;
}

BuiltModel build_robust(const Dataset& data, const std::vector<KeyedCut>& cuts, const DroConfig& cfg,
                        const ModelParams* fixed) {
  cfg.validate();
  data.validate();
  Builder b(data, fixed);
  b.add_beta(cfg.coef_bound);
  b.add_lambda(cfg);
  b.add_lasso(cfg.gamma);
  std::vector<double> need(static_cast<std::size_t>(data.N()), 0.0);
  for (const auto& c : cuts) {
    const double sign = c.family == Family::Plus ? -data.y[c.key->i] : data.y[c.key->i];
    auto& n = need[static_cast<std::size_t>(c.key->i)];
    n = std::max(n, sign * b.score_at_start(c.key->i, c.key->z));
  }
  b.add_s(need);
  for (const auto& c : cuts) {
    b.add_cut(*c.key, c.family, categorical_distance(disagreements(data, *c.key), cfg.metric.p), cfg.metric.kappa);
  }
  AffineExpr eps_term;
  eps_term.add(b.lambda(), cfg.epsilon);
  return b.finish(eps_term);
}

}  // namespace

BuiltModel build_erm(const Dataset& data, double gamma, double coef_bound, bool penalize_intercept) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  if (data.N() == 0) throw std::invalid_argument("empty dataset");
  data.validate();
  Builder b(data, nullptr);
  b.add_beta(coef_bound);
  b.add_lasso(gamma, penalize_intercept);
  b.add_s(std::vector<double>(static_cast<std::size_t>(data.N()), 0.0));
  for (int i = 0; i < data.N(); ++i) b.add_cut({i, data.categorical_row(i)}, Family::Plus, 0.0, 0.0);
  return b.finish(AffineExpr());
}

BuiltModel build_reduced_master(const Dataset& data, std::span<const CutKey> plus, std::span<const CutKey> minus,
                                const DroConfig& config, const ModelParams* fixed_beta) {
  std::vector<KeyedCut> cuts;
  for (const auto& k : plus) {
    check_key(data, k);
    cuts.push_back({&k, Family::Plus});
  }
  if (config.label_flip) {
    for (const auto& k : minus) {
      check_key(data, k);
      cuts.push_back({&k, Family::Minus});
    }
  }
  return build_robust(data, cuts, config, fixed_beta);
}

BuiltModel build_monolithic(const Dataset& data, const DroConfig& config) {
  config.validate();
  if (config.epsilon == 0.0) return build_erm(data, config.gamma, config.coef_bound);
  const auto count = configuration_count(data.cardinalities);
  if (count > config.enumeration_cap) {
    throw std::length_error("categorical configuration count " + std::to_string(count) +
                            " exceeds the enumeration cap " + std::to_string(config.enumeration_cap));
  }
  std::vector<CutKey> keys;
  keys.reserve(static_cast<std::size_t>(count) * static_cast<std::size_t>(data.N()));
  std::vector<int> z(static_cast<std::size_t>(data.m()), 0);
  for (int i = 0; i < data.N(); ++i) {
    std::fill(z.begin(), z.end(), 0);
    for (std::uint64_t q = 0; q < count; ++q) {
      keys.push_back({i, z});
      for (int j = data.m() - 1; j >= 0; --j) {
        auto& t = z[static_cast<std::size_t>(j)];
        if (++t < data.cardinalities[static_cast<std::size_t>(j)]) break;
        t = 0;
      }
    }
  }
  return build_reduced_master(data, keys, keys, config);
}

BuiltModel build_continuous_model(const Dataset& numeric_data, double epsilon, double kappa,
                                  std::vector<double> weights) {
  if (numeric_data.m() != 0) throw std::invalid_argument("continuous model expects numeric features only");
  DroConfig cfg;
  cfg.epsilon = epsilon;
  cfg.metric.norm = Norm::L1;
  cfg.metric.kappa = kappa;
  cfg.metric.weights = std::move(weights);
  return build_monolithic(numeric_data, cfg);
}

MasterSolution extract_solution(const BuiltModel& model, const SolveResult& result) {
  const auto& L = model.layout;
  MasterSolution sol;
  sol.status = result.status;
  sol.message = result.message;
  if (result.x.empty()) return sol;
  const auto& x = result.x;
  auto at = [&](int j) { return x[static_cast<std::size_t>(j)]; };
  sol.objective = result.objective;
  sol.beta = ModelParams::zeros(static_cast<int>(L.beta_num.size()), L.cardinalities);
  sol.beta.beta0 = at(L.beta0);
  for (std::size_t j = 0; j < L.beta_num.size(); ++j) sol.beta.beta_num[static_cast<Eigen::Index>(j)] = at(L.beta_num[j]);
  for (std::size_t j = 0; j < L.beta_cat.size(); ++j) sol.beta.beta_cat[static_cast<Eigen::Index>(j)] = at(L.beta_cat[j]);
  if (L.lambda >= 0) {
    sol.lambda = at(L.lambda);
    sol.lambda_at_bound = sol.lambda >= 0.999 * L.lambda_max;
  }
  for (int s : L.s) sol.s.push_back(at(s));
  for (const auto& c : L.cuts) {
    sol.u.push_back(at(c.u));
    sol.v.push_back(at(c.v));
  }
  const auto& vars = model.program.variables();
  auto near_bound = [&](int j) {
    const auto& b = vars[static_cast<std::size_t>(j)];
    const double v = at(j);
    return (std::isfinite(b.upper) && b.upper > b.lower && v >= b.upper - 1e-3 * std::abs(b.upper)) ||
           (std::isfinite(b.lower) && b.upper > b.lower && v <= b.lower + 1e-3 * std::abs(b.lower));
  };
  sol.coefficient_at_bound = near_bound(L.beta0);
  for (int j : L.beta_num) sol.coefficient_at_bound = sol.coefficient_at_bound || near_bound(j);
  for (int j : L.beta_cat) sol.coefficient_at_bound = sol.coefficient_at_bound || near_bound(j);
  if (sol.lambda_at_bound) sol.message += (sol.message.empty() ? "" : "; ") + std::string("lambda at its upper bound");
  if (sol.coefficient_at_bound) {
    sol.message += (sol.message.empty() ? "" : "; ") + std::string("coefficient at the magnitude cap (separable data?)");
  }
  return sol;
}

double empirical_log_loss(const ModelParams& beta, const Dataset& data) {
  if (data.N() == 0) throw std::invalid_argument("empty dataset");
  double total = 0.0;
  std::vector<double> x(static_cast<std::size_t>(data.n()));
  for (int i = 0; i < data.N(); ++i) {
    for (int j = 0; j < data.n(); ++j) x[static_cast<std::size_t>(j)] = data.X(i, j);
    const auto z = data.categorical_row(i);
    total += softplus(-data.y[i] * beta.score(x, z));
  }
  return total / data.N();
}

}  // namespace wdro
