#include "wdro/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace wdro {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration_limit";
    case SolveStatus::TimeLimit: return "time_limit";
    case SolveStatus::Numerical: return "numerical";
  }
  return "unknown";
}

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using RowMat = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using Triplet = Eigen::Triplet<double, int>;
using Clock = std::chrono::steady_clock;

// Every row and cone becomes a smooth convex constraint g(v) <= 0 over a
// contiguous group of affine rows v = C x + d:
//   Linear  g = v0
//   Lse     g = log sum_r exp(v_r)
//   ExpLog  g = v_c / b - log(v_a / b)      (b a positive constant)
//   ExpGen  g = v_c - v_b log(v_a / v_b)
//   Soc     g = |v_x|^2 / v_t - v_t
enum class Kind { Linear, Lse, ExpLog, ExpGen, Soc };

struct Constraint {
  Kind kind;
  int row;
  int count;
  double b = 1.0;
};

struct Form {
  int n = 0;
  Eigen::VectorXd c;
  double c0 = 0.0;
  RowMat C;
  Eigen::VectorXd d;
  std::vector<Constraint> cons;
  SpMat A;
  Eigen::VectorXd b;
  bool trivially_infeasible = false;
};

struct VarMap {
  enum class Role { Free, Fixed, Derived };
  std::vector<Role> role;
  std::vector<int> col;       // reduced column (Free)
  std::vector<double> value;  // Fixed
  std::vector<int> cone;      // Derived: exp cone whose `a` is this variable
  int reduced = 0;
};

// An auxiliary u that appears only as `a` of one exp cone with constant b > 0
// and in one row sum_j alpha_j u_j <= beta is eliminated; that row becomes
// log sum_j exp(c_j / b_j + log(alpha_j b_j / beta)) <= 0.
struct Presolve {
  VarMap map;
  std::vector<int> lse_rows;
  std::vector<char> cone_absorbed;
};

bool is_single_var(const AffineExpr& e, int& var) {
  if (e.terms().size() != 1 || e.constant() != 0.0 || e.terms()[0].coef != 1.0) return false;
  var = e.terms()[0].var;
  return true;
}

Presolve presolve(const ConicProgram& p) {
  const auto nv = static_cast<std::size_t>(p.num_variables());
  Presolve ps;
  auto& m = ps.map;
  m.role.assign(nv, VarMap::Role::Free);
  m.col.assign(nv, -1);
  m.value.assign(nv, 0.0);
  m.cone.assign(nv, -1);
  ps.cone_absorbed.assign(p.exp_cones().size(), 0);

  std::vector<int> uses(nv, 0);
  std::vector<int> a_cone(nv, -1);
  auto count = [&](const AffineExpr& e) {
    for (const auto& t : e.terms()) ++uses[static_cast<std::size_t>(t.var)];
  };
  count(p.objective());
  for (const auto& r : p.rows()) count(r.expr);
  for (std::size_t k = 0; k < p.exp_cones().size(); ++k) {
    const auto& cone = p.exp_cones()[k];
    count(cone.a);
    count(cone.b);
    count(cone.c);
    int v;
    if (is_single_var(cone.a, v) && cone.b.is_constant() && cone.b.constant() > 0.0) {
      auto& slot = a_cone[static_cast<std::size_t>(v)];
      slot = slot == -1 ? static_cast<int>(k) : -2;
    }
  }
  for (const auto& q : p.second_order_cones()) {
    count(q.t);
    for (const auto& e : q.x) count(e);
  }
  auto candidate = [&](int v) {
    const auto j = static_cast<std::size_t>(v);
    const auto& b = p.variables()[j];
    return a_cone[j] >= 0 && uses[j] == 2 && b.upper == kInfinity && b.lower <= 0.0;
  };
  auto cone_of = [&](int v) -> const ExpConeTriple& {
    return p.exp_cones()[static_cast<std::size_t>(a_cone[static_cast<std::size_t>(v)])];
  };

  std::vector<char> eliminated(nv, 0);
  for (std::size_t r = 0; r < p.rows().size(); ++r) {
    const auto& row = p.rows()[r];
    if (row.sense != RowSense::LessEqual || !(row.expr.constant() < 0.0) || row.expr.terms().empty()) continue;
    bool ok = true;
    for (const auto& t : row.expr.terms()) ok = ok && t.coef > 0.0 && candidate(t.var);
    if (!ok) continue;
    ps.lse_rows.push_back(static_cast<int>(r));
    for (const auto& t : row.expr.terms()) eliminated[static_cast<std::size_t>(t.var)] = 1;
  }
  // A c-expression must not reference another eliminated variable.
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<int> keep;
    for (int r : ps.lse_rows) {
      const auto& terms = p.rows()[static_cast<std::size_t>(r)].expr.terms();
      bool ok = true;
      for (const auto& t : terms) {
        for (const auto& ct : cone_of(t.var).c.terms()) ok = ok && !eliminated[static_cast<std::size_t>(ct.var)];
      }
      if (ok) {
        keep.push_back(r);
      } else {
        for (const auto& t : terms) eliminated[static_cast<std::size_t>(t.var)] = 0;
        changed = true;
      }
    }
    ps.lse_rows = std::move(keep);
  }
  for (int r : ps.lse_rows) {
    for (const auto& t : p.rows()[static_cast<std::size_t>(r)].expr.terms()) {
      const auto j = static_cast<std::size_t>(t.var);
      m.role[j] = VarMap::Role::Derived;
      m.cone[j] = a_cone[j];
      ps.cone_absorbed[static_cast<std::size_t>(a_cone[j])] = 1;
    }
  }
  for (std::size_t j = 0; j < nv; ++j) {
    if (m.role[j] == VarMap::Role::Derived) continue;
    const auto& b = p.variables()[j];
    if (b.lower == b.upper) {
      m.role[j] = VarMap::Role::Fixed;
      m.value[j] = b.lower;
    } else {
      m.col[j] = m.reduced++;
    }
  }
  return ps;
}

class FormBuilder {
 public:
  explicit FormBuilder(const VarMap& map) : map_(map) {}

  // Appends scale * e + shift as an affine row and returns its index.
  int affine(const AffineExpr& e, double scale = 1.0, double shift = 0.0) {
    const int r = static_cast<int>(d_.size());
    double constant = e.constant();
    for (const auto& t : e.terms()) {
      const auto j = static_cast<std::size_t>(t.var);
      switch (map_.role[j]) {
        case VarMap::Role::Free: trips_.emplace_back(r, map_.col[j], scale * t.coef); break;
        case VarMap::Role::Fixed: constant += t.coef * map_.value[j]; break;
        case VarMap::Role::Derived: throw std::logic_error("eliminated variable referenced");
      }
    }
    d_.push_back(scale * constant + shift);
    return r;
  }

  int unit(int col, double scale, double shift) {
    const int r = static_cast<int>(d_.size());
    trips_.emplace_back(r, col, scale);
    d_.push_back(shift);
    return r;
  }

  void constraint(Kind kind, int first_row, double b = 1.0) {
    cons_.push_back({kind, first_row, static_cast<int>(d_.size()) - first_row, b});
  }

  void equality(const AffineExpr& e) {
    const int r = static_cast<int>(beq_.size());
    double constant = e.constant();
    for (const auto& t : e.terms()) {
      const auto j = static_cast<std::size_t>(t.var);
      if (map_.role[j] == VarMap::Role::Free) {
        eq_trips_.emplace_back(r, map_.col[j], t.coef);
      } else if (map_.role[j] == VarMap::Role::Fixed) {
        constant += t.coef * map_.value[j];
      } else {
        throw std::logic_error("eliminated variable referenced");
      }
    }
    beq_.push_back(-constant);
  }

  Form finish(const AffineExpr& objective, bool infeasible) {
    Form f;
    f.n = map_.reduced;
    f.c = Eigen::VectorXd::Zero(f.n);
    f.c0 = objective.constant();
    for (const auto& t : objective.terms()) {
      const auto j = static_cast<std::size_t>(t.var);
      if (map_.role[j] == VarMap::Role::Free) {
        f.c[map_.col[j]] += t.coef;
      } else if (map_.role[j] == VarMap::Role::Fixed) {
        f.c0 += t.coef * map_.value[j];
      }
    }
    f.C.resize(static_cast<int>(d_.size()), f.n);
    f.C.setFromTriplets(trips_.begin(), trips_.end());
    f.d = Eigen::Map<Eigen::VectorXd>(d_.data(), static_cast<Eigen::Index>(d_.size()));
    f.cons = std::move(cons_);
    f.A.resize(static_cast<int>(beq_.size()), f.n);
    f.A.setFromTriplets(eq_trips_.begin(), eq_trips_.end());
    f.b = Eigen::Map<Eigen::VectorXd>(beq_.data(), static_cast<Eigen::Index>(beq_.size()));
    f.trivially_infeasible = infeasible;
    return f;
  }

 private:
  const VarMap& map_;
  std::vector<Triplet> trips_;
  std::vector<double> d_;
  std::vector<Constraint> cons_;
  std::vector<Triplet> eq_trips_;
  std::vector<double> beq_;
};

Form build_form(const ConicProgram& p, const Presolve& ps) {
  const auto& map = ps.map;
  FormBuilder fb(map);
  bool infeasible = false;
  for (int j = 0; j < p.num_variables(); ++j) {
    const auto ju = static_cast<std::size_t>(j);
    if (map.role[ju] != VarMap::Role::Free) continue;
    const auto& v = p.variables()[ju];
    if (std::isfinite(v.lower)) fb.constraint(Kind::Linear, fb.unit(map.col[ju], -1.0, v.lower));
    if (std::isfinite(v.upper)) fb.constraint(Kind::Linear, fb.unit(map.col[ju], 1.0, -v.upper));
  }
  std::vector<char> is_lse(p.rows().size(), 0);
  for (int r : ps.lse_rows) is_lse[static_cast<std::size_t>(r)] = 1;
  for (std::size_t r = 0; r < p.rows().size(); ++r) {
    const auto& row = p.rows()[r];
    if (is_lse[r]) {
      const double beta = -row.expr.constant();
      int first = -1;
      for (const auto& t : row.expr.terms()) {
        const auto& cone = p.exp_cones()[static_cast<std::size_t>(map.cone[static_cast<std::size_t>(t.var)])];
        const double b = cone.b.constant();
        const int idx = fb.affine(cone.c, 1.0 / b, std::log(t.coef * b / beta));
        if (first < 0) first = idx;
      }
      fb.constraint(Kind::Lse, first);
      continue;
    }
    switch (row.sense) {
      case RowSense::LessEqual: fb.constraint(Kind::Linear, fb.affine(row.expr)); break;
      case RowSense::GreaterEqual: fb.constraint(Kind::Linear, fb.affine(row.expr, -1.0)); break;
      case RowSense::Equal: fb.equality(row.expr); break;
    }
  }
  for (std::size_t k = 0; k < p.exp_cones().size(); ++k) {
    if (ps.cone_absorbed[k]) continue;
    const auto& cone = p.exp_cones()[k];
    bool b_const = true;
    double b_value = cone.b.constant();
    for (const auto& t : cone.b.terms()) {
      const auto j = static_cast<std::size_t>(t.var);
      if (map.role[j] == VarMap::Role::Free) {
        b_const = false;
      } else {
        b_value += t.coef * map.value[j];
      }
    }
    if (b_const && b_value > 0.0) {
      const int ra = fb.affine(cone.a);
      fb.affine(cone.c);
      fb.constraint(Kind::ExpLog, ra, b_value);
    } else if (b_const && b_value == 0.0) {
      // Closure at b = 0: a >= 0, c <= 0.
      fb.constraint(Kind::Linear, fb.affine(cone.a, -1.0));
      fb.constraint(Kind::Linear, fb.affine(cone.c));
    } else if (b_const) {
      infeasible = true;
    } else {
      const int ra = fb.affine(cone.a);
      fb.affine(cone.b);
      fb.affine(cone.c);
      fb.constraint(Kind::ExpGen, ra);
    }
  }
  for (const auto& q : p.second_order_cones()) {
    if (q.x.empty()) {
      fb.constraint(Kind::Linear, fb.affine(q.t, -1.0));
      continue;
    }
    const int rt = fb.affine(q.t);
    for (const auto& e : q.x) fb.affine(e);
    fb.constraint(Kind::Soc, rt);
  }
  return fb.finish(p.objective(), infeasible);
}

// Lse and Linear are defined everywhere; the rest need positive a / b / t.
bool in_domain(const Form& f, const Eigen::VectorXd& v) {
  for (const auto& k : f.cons) {
    const double* p = v.data() + k.row;
    switch (k.kind) {
      case Kind::Linear:
      case Kind::Lse: break;
      case Kind::ExpLog:
      case Kind::Soc:
        if (!(p[0] > 0.0)) return false;
        break;
      case Kind::ExpGen:
        if (!(p[0] > 0.0) || !(p[1] > 0.0)) return false;
        break;
    }
  }
  return true;
}

// Returns g and writes the gradient (count entries) and, on request, the
// column-major Hessian block (count x count), both in affine-row coordinates.
double eval_constraint(const Constraint& k, const double* v, double* grad, double* hess, bool want_hess) {
  const int R = k.count;
  if (want_hess) std::fill(hess, hess + R * R, 0.0);
  switch (k.kind) {
    case Kind::Linear:
      grad[0] = 1.0;
      return v[0];
    case Kind::Lse: {
      double mx = v[0];
      for (int r = 1; r < R; ++r) mx = std::max(mx, v[r]);
      double sum = 0.0;
      for (int r = 0; r < R; ++r) {
        grad[r] = std::exp(v[r] - mx);
        sum += grad[r];
      }
      for (int r = 0; r < R; ++r) grad[r] /= sum;
      if (want_hess) {
        for (int a = 0; a < R; ++a) {
          for (int b = 0; b < R; ++b) hess[a + b * R] = (a == b ? grad[a] : 0.0) - grad[a] * grad[b];
        }
      }
      return mx + std::log(sum);
    }
    case Kind::ExpLog: {
      const double a = v[0];
      grad[0] = -1.0 / a;
      grad[1] = 1.0 / k.b;
      if (want_hess) hess[0] = 1.0 / (a * a);
      return v[1] / k.b - std::log(a / k.b);
    }
    case Kind::ExpGen: {
      const double a = v[0], b = v[1];
      const double l = std::log(a / b);
      grad[0] = -b / a;
      grad[1] = 1.0 - l;
      grad[2] = 1.0;
      if (want_hess) {
        hess[0] = b / (a * a);
        hess[1] = hess[3] = -1.0 / a;
        hess[4] = 1.0 / b;
      }
      return v[2] - b * l;
    }
    case Kind::Soc: {
      const double t = v[0];
      double sq = 0.0;
      for (int r = 1; r < R; ++r) sq += v[r] * v[r];
      grad[0] = -sq / (t * t) - 1.0;
      for (int r = 1; r < R; ++r) grad[r] = 2.0 * v[r] / t;
      if (want_hess) {
        hess[0] = 2.0 * sq / (t * t * t);
        for (int r = 1; r < R; ++r) {
          hess[r] = hess[r * R] = -2.0 * v[r] / (t * t);
          hess[r + r * R] = 2.0 / t;
        }
      }
      return sq / t - t;
    }
  }
  return 0.0;
}

// Newton matrix C' M C + delta I with M block-diagonal over constraints,
// bordered by the equality rows when present.
class NewtonSystem {
 public:
  explicit NewtonSystem(const Form& f) : f_(f), Ct_(f.C.transpose()) {
    std::vector<Triplet> trips;
    for (const auto& k : f.cons) {
      for (int b = 0; b < k.count; ++b) {
        for (int a = 0; a < k.count; ++a) trips.emplace_back(k.row + a, k.row + b, 1.0);
      }
    }
    const int rows = static_cast<int>(f.d.size());
    M_.resize(rows, rows);
    M_.setFromTriplets(trips.begin(), trips.end());
    M_.makeCompressed();
    dense_ = f.n + f.A.rows() <= kDenseLimit;
  }

  // Values in constraint order, each block column-major.
  double* block_values() { return M_.valuePtr(); }

  bool factorize() {
    const SpMat MC = M_ * f_.C;
    const SpMat H = Ct_ * MC;
    const int n = f_.n;
    const int me = static_cast<int>(f_.A.rows());
    double scale = 1.0;
    for (int k = 0; k < H.outerSize(); ++k) {
      for (SpMat::InnerIterator it(H, k); it; ++it) {
        if (it.row() == it.col()) scale = std::max(scale, std::abs(it.value()));
      }
    }
    reg_ = 1e-13 * scale;
    const double reg = reg_;
    if (dense_) {
      dense_kkt_ = Eigen::MatrixXd::Zero(n + me, n + me);
      dense_kkt_.topLeftCorner(n, n) = Eigen::MatrixXd(H);
      for (int j = 0; j < n; ++j) dense_kkt_(j, j) += reg;
      if (me > 0) {
        const Eigen::MatrixXd A(f_.A);
        dense_kkt_.bottomLeftCorner(me, n) = A;
        dense_kkt_.topRightCorner(n, me) = A.transpose();
        for (int j = 0; j < me; ++j) dense_kkt_(n + j, n + j) = -kEqReg;
      }
      dense_ldlt_.compute(dense_kkt_);
      return dense_ldlt_.info() == Eigen::Success;
    }
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(H.nonZeros() + n + f_.A.nonZeros() + me));
    for (int k = 0; k < H.outerSize(); ++k) {
      for (SpMat::InnerIterator it(H, k); it; ++it) {
        if (it.row() >= it.col()) trips.emplace_back(it.row(), it.col(), it.value());
      }
    }
    for (int j = 0; j < n; ++j) trips.emplace_back(j, j, reg);
    for (int k = 0; k < f_.A.outerSize(); ++k) {
      for (SpMat::InnerIterator it(f_.A, k); it; ++it) trips.emplace_back(n + it.row(), it.col(), it.value());
    }
    for (int j = 0; j < me; ++j) trips.emplace_back(n + j, n + j, -kEqReg);
    kkt_.resize(n + me, n + me);
    kkt_.setFromTriplets(trips.begin(), trips.end());
    if (kkt_.nonZeros() != pattern_nnz_) {
      ldlt_.analyzePattern(kkt_);
      pattern_nnz_ = kkt_.nonZeros();
    }
    ldlt_.factorize(kkt_);
    return ldlt_.info() == Eigen::Success;
  }

  // Solves the bordered system, refining against the unregularized equality block.
  void solve(const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, Eigen::VectorXd& dx, Eigen::VectorXd& dy) {
    const int n = f_.n;
    const int me = static_cast<int>(f_.A.rows());
    Eigen::VectorXd rhs(n + me);
    rhs.head(n) = r1;
    if (me > 0) rhs.tail(me) = r2;
    Eigen::VectorXd sol = raw_solve(rhs);
    for (int it = 0; it < 2; ++it) sol += raw_solve(rhs - apply(sol));
    dx = sol.head(n);
    dy = sol.tail(me);
  }

 private:
  static constexpr int kDenseLimit = 400;
  static constexpr double kEqReg = 1e-12;

  Eigen::VectorXd raw_solve(const Eigen::VectorXd& rhs) {
    if (dense_) return dense_ldlt_.solve(rhs);
    return ldlt_.solve(rhs);
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& sol) const {
    const int me = static_cast<int>(f_.A.rows());
    Eigen::VectorXd out = dense_ ? Eigen::VectorXd(dense_kkt_ * sol)
                                 : Eigen::VectorXd(kkt_.selfadjointView<Eigen::Lower>() * sol);
    out.head(f_.n) -= reg_ * sol.head(f_.n);
    if (me > 0) out.tail(me) += kEqReg * sol.tail(me);
    return out;
  }

  const Form& f_;
  SpMat Ct_;
  SpMat M_;
  bool dense_;
  double reg_ = 0.0;
  Eigen::MatrixXd dense_kkt_;
  Eigen::LDLT<Eigen::MatrixXd> dense_ldlt_;
  SpMat kkt_;
  Eigen::Index pattern_nnz_ = -1;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
};

enum class Outcome { Optimal, IterationLimit, TimeLimit, Infeasible, Unbounded, Numerical };

struct PdResult {
  Outcome outcome = Outcome::Numerical;
  Eigen::VectorXd x;
  double gap = kInfinity;
  std::string message;
};

struct Budget {
  int iterations_left;
  bool has_deadline;
  Clock::time_point deadline;
  bool verbose;
};

// Mehrotra predictor-corrector on
//   min c'x  s.t.  g_k(C x + d) + w_k = 0,  w, z >= 0,  A x = b.
class PrimalDual {
 public:
  PrimalDual(const Form& f, double feas_tol, double gap_tol)
      : f_(f), sys_(f), feas_tol_(feas_tol), gap_tol_(gap_tol) {
    const auto K = f.cons.size();
    g_.resize(static_cast<Eigen::Index>(K));
    grad_.resize(f.d.size());
    hess_off_.resize(K);
    int off = 0;
    for (std::size_t k = 0; k < K; ++k) {
      hess_off_[k] = off;
      off += f.cons[k].count * f.cons[k].count;
    }
    hess_.resize(static_cast<std::size_t>(off));
  }

  PdResult run(Eigen::VectorXd x, Budget& budget, const char* label) {
    const int K = static_cast<int>(f_.cons.size());
    const int me = static_cast<int>(f_.A.rows());
    PdResult res;
    res.x = x;
    Eigen::VectorXd v = f_.C * x + f_.d;
    if (!in_domain(f_, v)) {
      res.message = "start outside the constraint domain";
      return res;
    }
    evaluate(v, false);
    Eigen::VectorXd w(K), z(K), y = Eigen::VectorXd::Zero(me);
    for (int k = 0; k < K; ++k) {
      w[k] = std::max(-g_[k], 1.0);
      z[k] = 1.0 / w[k];
    }
    const double cnorm = std::max(1.0, f_.c.lpNorm<Eigen::Infinity>());
    const double bnorm = me > 0 ? std::max(1.0, f_.b.lpNorm<Eigen::Infinity>()) : 1.0;

    Eigen::VectorXd q(f_.d.size()), rd, rp, re, rc, dx, dy, dz(K), dw(K), Cdx, e(K);
    Best best;
    double last_alpha = 0.0;
    int short_steps = 0;
    double progress_score = kInfinity;
    int progress_iter = 0;
    for (int iter = 0;; ++iter) {
      evaluate(v, true);
      expand(z, q);
      rd = f_.C.transpose() * q;
      const double dscale = std::max(cnorm, rd.lpNorm<Eigen::Infinity>());
      rd += f_.c;
      if (me > 0) {
        rd += f_.A.transpose() * y;
        re = f_.A * x - f_.b;
      }
      rp = g_ + w;
      const double gap = K > 0 ? w.dot(z) : 0.0;
      const double mu = K > 0 ? gap / K : 0.0;
      const double obj = f_.c.dot(x) + f_.c0;
      double pres = 0.0;
      for (int k = 0; k < K; ++k) pres = std::max(pres, std::abs(rp[k]) / std::max(1.0, w[k]));
      if (me > 0) pres = std::max(pres, re.lpNorm<Eigen::Infinity>() / bnorm);
      const double dres = rd.lpNorm<Eigen::Infinity>() / dscale;
      res.x = x;
      res.gap = gap;
      const double score = std::max({pres / feas_tol_, dres / feas_tol_, gap / (gap_tol_ * std::max(1.0, std::abs(obj)))});
      if (score < best.score) best = {score, pres, dres, gap / std::max(1.0, std::abs(obj)), x, gap};
      if (score < 0.9 * progress_score) {
        progress_score = score;
        progress_iter = iter;
      }
      if (budget.verbose) {
        std::cerr << "[pd:" << label << "] it=" << iter << " obj=" << obj << " pres=" << pres << " dres=" << dres
                  << " gap=" << gap << " step=" << last_alpha << "\n";
      }
      if (pres <= feas_tol_ && dres <= feas_tol_ && gap <= gap_tol_ * std::max(1.0, std::abs(obj))) {
        res.outcome = Outcome::Optimal;
        return res;
      }
      if (K > 0 && z.lpNorm<Eigen::Infinity>() > 1e13 && pres > feas_tol_) {
        res.outcome = Outcome::Infeasible;
        res.message = "dual iterates diverged with a positive primal residual";
        return res;
      }
      if (x.lpNorm<Eigen::Infinity>() > 1e13) {
        res.outcome = Outcome::Unbounded;
        res.message = "primal iterates diverged";
        return res;
      }
      const bool primal_done = best.pres <= feas_tol_;
      if (iter - progress_iter >= kStallIterations && (primal_done || short_steps >= kStallIterations)) {
        res.outcome = Outcome::Numerical;
        res.message = "no progress";
        return settle(res, best);
      }
      if (budget.iterations_left <= 0) {
        res.outcome = Outcome::IterationLimit;
        res.message = "iteration limit reached";
        return settle(res, best);
      }
      if (budget.has_deadline && Clock::now() > budget.deadline) {
        res.outcome = Outcome::TimeLimit;
        res.message = "time limit reached";
        return res;
      }
      --budget.iterations_left;

      double* M = sys_.block_values();
      for (int k = 0; k < K; ++k) {
        const auto& c = f_.cons[static_cast<std::size_t>(k)];
        const double* gr = grad_.data() + c.row;
        const double* h = hess_.data() + hess_off_[static_cast<std::size_t>(k)];
        const double zw = z[k] / w[k];
        for (int b = 0; b < c.count; ++b) {
          for (int a = 0; a < c.count; ++a) *M++ = zw * gr[a] * gr[b] + z[k] * h[a + b * c.count];
        }
      }
      if (!sys_.factorize()) {
        res.outcome = Outcome::Numerical;
        res.message = "Newton system factorization failed";
        return settle(res, best);
      }

      auto direction = [&](const Eigen::VectorXd& rc_in) {
        for (int k = 0; k < K; ++k) e[k] = (z[k] * rp[k] - rc_in[k]) / w[k];
        expand(e, q);
        const Eigen::VectorXd r1 = -rd - f_.C.transpose() * q;
        const Eigen::VectorXd r2 = me > 0 ? Eigen::VectorXd(-re) : Eigen::VectorXd();
        sys_.solve(r1, r2, dx, dy);
        Cdx = f_.C * dx;
        for (int k = 0; k < K; ++k) {
          const auto& c = f_.cons[static_cast<std::size_t>(k)];
          double jd = 0.0;
          for (int r = 0; r < c.count; ++r) jd += grad_[c.row + r] * Cdx[c.row + r];
          dz[k] = (z[k] * (jd + rp[k]) - rc_in[k]) / w[k];
          dw[k] = -(rc_in[k] + w[k] * dz[k]) / z[k];
        }
      };
      auto max_step = [&]() {
        double a = 1.0;
        for (int k = 0; k < K; ++k) {
          if (dw[k] < 0.0) a = std::min(a, -w[k] / dw[k]);
          if (dz[k] < 0.0) a = std::min(a, -z[k] / dz[k]);
        }
        return a;
      };

      rc = w.cwiseProduct(z);
      direction(rc);
      const double a_aff = max_step();
      double sigma = 0.0;
      if (K > 0 && mu > 0.0) {
        const double mu_aff = (w + a_aff * dw).dot(z + a_aff * dz) / K;
        sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);
      }
      // No point driving complementarity far below the requested gap.
      // Complementarity should not run far ahead of the residuals either.
      const double mu_floor =
          K > 0 ? 0.1 * std::max({gap_tol_, pres, dres}) * std::max(1.0, std::abs(obj)) / K : 0.0;
      const double target = std::max(sigma * mu, std::min(mu, mu_floor));
      rc = w.cwiseProduct(z) + dw.cwiseProduct(dz) - Eigen::VectorXd::Constant(K, target);
      direction(rc);
      double alpha = std::min(1.0, 0.99 * max_step());
      for (int tries = 0; !in_domain(f_, v + alpha * Cdx); ++tries) {
        alpha *= 0.5;
        if (tries > 60) {
          res.outcome = Outcome::Numerical;
          res.message = "step could not stay inside the constraint domain";
          return settle(res, best);
        }
      }
      if (alpha < 1e-12) {
        res.outcome = Outcome::Numerical;
        res.message = "step length collapsed";
        return settle(res, best);
      }
      last_alpha = alpha;
      short_steps = alpha < kShortStep ? short_steps + 1 : 0;
      x += alpha * dx;
      v = f_.C * x + f_.d;
      w += alpha * dw;
      z += alpha * dz;
      if (me > 0) y += alpha * dy;
    }
  }

 private:
  static constexpr int kStallIterations = 12;
  static constexpr double kShortStep = 0.05;
  static constexpr double kInexactFactor = 1e3;

  struct Best {
    double score = kInfinity;
    double pres = kInfinity;
    double dres = kInfinity;
    double rel_gap = kInfinity;
    Eigen::VectorXd x;
    double gap = kInfinity;
  };

  // Iterations that stop early still count as optimal when the best iterate is
  // primal feasible and its dual residual and gap are within kInexactFactor of
  // the tolerances.
  PdResult settle(PdResult res, const Best& best) const {
    if (best.x.size() == 0 || best.pres > feas_tol_ || best.dres > kInexactFactor * feas_tol_ ||
        best.rel_gap > kInexactFactor * gap_tol_) {
      return res;
    }
    std::ostringstream msg;
    msg << "reduced accuracy (" << res.message << "): dual residual " << best.dres << ", relative gap "
        << best.rel_gap;
    res.outcome = Outcome::Optimal;
    res.x = best.x;
    res.gap = best.gap;
    res.message = msg.str();
    return res;
  }

  void evaluate(const Eigen::VectorXd& v, bool want_hess) {
    for (std::size_t k = 0; k < f_.cons.size(); ++k) {
      const auto& c = f_.cons[k];
      g_[static_cast<Eigen::Index>(k)] =
          eval_constraint(c, v.data() + c.row, grad_.data() + c.row, hess_.data() + hess_off_[k], want_hess);
    }
  }

  // q[row] = s_k * grad[row] over the rows of each constraint k.
  void expand(const Eigen::VectorXd& s, Eigen::VectorXd& q) const {
    for (std::size_t k = 0; k < f_.cons.size(); ++k) {
      const auto& c = f_.cons[k];
      for (int r = 0; r < c.count; ++r) q[c.row + r] = s[static_cast<Eigen::Index>(k)] * grad_[c.row + r];
    }
  }

  const Form& f_;
  NewtonSystem sys_;
  double feas_tol_;
  double gap_tol_;
  Eigen::VectorXd g_;
  Eigen::VectorXd grad_;
  std::vector<int> hess_off_;
  std::vector<double> hess_;
};

// A point with every domain row (a of exp cones, b of general ones, t of
// second-order cones) strictly positive: maximize r <= min(rows, 1) as an LP.
std::optional<Eigen::VectorXd> domain_point(const Form& f, const Eigen::VectorXd& x0, Budget& budget) {
  std::vector<int> rows;
  for (const auto& k : f.cons) {
    if (k.kind == Kind::ExpLog || k.kind == Kind::Soc || k.kind == Kind::ExpGen) rows.push_back(k.row);
    if (k.kind == Kind::ExpGen) rows.push_back(k.row + 1);
  }
  Form lp;
  lp.n = f.n + 1;
  lp.c = Eigen::VectorXd::Zero(lp.n);
  lp.c[f.n] = -1.0;
  std::vector<Triplet> trips;
  std::vector<double> d;
  for (int r : rows) {
    const int idx = static_cast<int>(d.size());
    for (RowMat::InnerIterator it(f.C, r); it; ++it) trips.emplace_back(idx, static_cast<int>(it.col()), -it.value());
    trips.emplace_back(idx, f.n, 1.0);
    d.push_back(-f.d[r]);
    lp.cons.push_back({Kind::Linear, idx, 1});
  }
  const int cap = static_cast<int>(d.size());
  trips.emplace_back(cap, f.n, 1.0);
  d.push_back(-1.0);
  lp.cons.push_back({Kind::Linear, cap, 1});
  lp.C.resize(static_cast<int>(d.size()), lp.n);
  lp.C.setFromTriplets(trips.begin(), trips.end());
  lp.d = Eigen::Map<Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
  std::vector<Triplet> at;
  for (int k = 0; k < f.A.outerSize(); ++k) {
    for (SpMat::InnerIterator it(f.A, k); it; ++it) at.emplace_back(it.row(), it.col(), it.value());
  }
  lp.A.resize(f.A.rows(), lp.n);
  lp.A.setFromTriplets(at.begin(), at.end());
  lp.b = f.b;
  Eigen::VectorXd start(lp.n);
  start.head(f.n) = x0;
  start[f.n] = 0.0;
  PrimalDual pd(lp, 1e-9, 1e-9);
  const PdResult r = pd.run(start, budget, "domain");
  if (r.outcome != Outcome::Optimal && r.outcome != Outcome::IterationLimit) return std::nullopt;
  if (!(r.x[f.n] > 1e-9)) return std::nullopt;
  Eigen::VectorXd x = r.x.head(f.n);
  if (!in_domain(f, f.C * x + f.d)) return std::nullopt;
  return x;
}

Eigen::VectorXd default_start(const ConicProgram& p) {
  const int n = p.num_variables();
  Eigen::VectorXd x(n);
  for (int j = 0; j < n; ++j) {
    const auto& v = p.variables()[static_cast<std::size_t>(j)];
    const bool lo = std::isfinite(v.lower);
    const bool hi = std::isfinite(v.upper);
    if (lo && hi) {
      if (v.lower < 0.0 && v.upper > 0.0) {
        x[j] = 0.0;
      } else {
        x[j] = v.upper - v.lower > 2.0 ? v.lower + 1.0 : 0.5 * (v.lower + v.upper);
      }
    } else if (lo) {
      x[j] = std::max(0.0, v.lower + 1.0);
    } else if (hi) {
      x[j] = std::min(0.0, v.upper - 1.0);
    } else {
      x[j] = 0.0;
    }
  }
  return x;
}

}  // namespace

SolveResult solve(const ConicProgram& program, const SolverConfig& config) {
  const auto start = Clock::now();
  SolveResult out;
  auto finish = [&](SolveStatus st, std::string msg) {
    out.status = st;
    out.message = std::move(msg);
    out.solve_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return out;
  };

  program.validate();
  const Presolve ps = presolve(program);
  const Form f = build_form(program, ps);
  if (f.trivially_infeasible) return finish(SolveStatus::Infeasible, "exponential cone with negative constant b");
  Budget budget{config.max_iterations, std::isfinite(config.time_limit_seconds), {}, config.verbose};
  if (budget.has_deadline) {
    budget.deadline =
        start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(config.time_limit_seconds));
  }

  auto reduce = [&](std::span<const double> full) {
    Eigen::VectorXd x(f.n);
    for (std::size_t j = 0; j < full.size(); ++j) {
      if (ps.map.role[j] == VarMap::Role::Free) x[ps.map.col[j]] = full[j];
    }
    return x;
  };
  const Eigen::VectorXd def = default_start(program);
  Eigen::VectorXd x0 = reduce(std::span<const double>(def.data(), static_cast<std::size_t>(def.size())));
  const auto& hint = program.initial_point();
  if (static_cast<int>(hint.size()) == program.num_variables()) {
    const Eigen::VectorXd h = reduce(hint);
    if (h.allFinite()) x0 = h;
  }
  if (!in_domain(f, f.C * x0 + f.d)) {
    auto dp = domain_point(f, x0, budget);
    if (!dp) return finish(SolveStatus::Infeasible, "cone domain has no interior point");
    x0 = *dp;
  }

  PrimalDual pd(f, config.feasibility_tol, config.gap_tol);
  const PdResult r = pd.run(x0, budget, "main");
  out.iterations = config.max_iterations - budget.iterations_left;

  // Eliminated auxiliaries take their tightest feasible value b exp(c / b).
  std::vector<double> full(static_cast<std::size_t>(program.num_variables()), 0.0);
  for (std::size_t j = 0; j < full.size(); ++j) {
    if (ps.map.role[j] == VarMap::Role::Free) full[j] = r.x[ps.map.col[j]];
    if (ps.map.role[j] == VarMap::Role::Fixed) full[j] = ps.map.value[j];
  }
  for (std::size_t j = 0; j < full.size(); ++j) {
    if (ps.map.role[j] != VarMap::Role::Derived) continue;
    const auto& cone = program.exp_cones()[static_cast<std::size_t>(ps.map.cone[j])];
    const double b = cone.b.constant();
    full[j] = b * std::exp(cone.c.evaluate(full) / b);
  }
  out.x = std::move(full);
  out.objective = program.evaluate_objective(out.x);
  out.gap = r.gap;
  switch (r.outcome) {
    case Outcome::Optimal: return finish(SolveStatus::Optimal, r.message);
    case Outcome::IterationLimit: return finish(SolveStatus::IterationLimit, r.message);
    case Outcome::TimeLimit: return finish(SolveStatus::TimeLimit, r.message);
    case Outcome::Infeasible: return finish(SolveStatus::Infeasible, r.message);
    case Outcome::Unbounded: return finish(SolveStatus::Unbounded, r.message);
    case Outcome::Numerical: return finish(SolveStatus::Numerical, r.message);
  }
  return finish(SolveStatus::Numerical, "unreachable");
}

}  // namespace wdro
