#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace wdro {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct LinearTerm {
  int var;
  double coef;
};

/// Sparse affine expression `sum_j coef_j * x_j + constant` over program variables.
/// Repeated variables are allowed while building; `compress()` merges them.
class AffineExpr {
 public:
  AffineExpr() = default;
  explicit AffineExpr(double constant) : constant_(constant) {}

  static AffineExpr variable(int var, double coef = 1.0) {
    AffineExpr e;
    e.terms_.push_back({var, coef});
    return e;
  }

  AffineExpr& add(int var, double coef) {
    if (coef != 0.0) terms_.push_back({var, coef});
    return *this;
  }
  AffineExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }

  AffineExpr& operator+=(const AffineExpr& other);
  AffineExpr& operator-=(const AffineExpr& other);
  AffineExpr& operator*=(double scale);

  friend AffineExpr operator+(AffineExpr lhs, const AffineExpr& rhs) { return lhs += rhs; }
  friend AffineExpr operator-(AffineExpr lhs, const AffineExpr& rhs) { return lhs -= rhs; }
  friend AffineExpr operator*(double s, AffineExpr e) { return e *= s; }
  friend AffineExpr operator-(AffineExpr e) { return e *= -1.0; }

  /// Sorts terms by variable and merges duplicates; drops exact zeros.
  void compress();

  double evaluate(std::span<const double> x) const;

  const std::vector<LinearTerm>& terms() const { return terms_; }
  double constant() const { return constant_; }
  bool is_constant() const { return terms_.empty(); }

 private:
  std::vector<LinearTerm> terms_;
  double constant_ = 0.0;
};

enum class RowSense { LessEqual, GreaterEqual, Equal };

/// `expr (sense) 0`.
struct LinearRow {
  AffineExpr expr;
  RowSense sense;
};

/// (a, b, c) in K_exp, i.e. a >= b * exp(c / b) with a, b > 0 (closure).
struct ExpConeTriple {
  AffineExpr a;
  AffineExpr b;
  AffineExpr c;
};

/// t >= ||(x_1, ..., x_d)||_2.
struct SecondOrderCone {
  AffineExpr t;
  std::vector<AffineExpr> x;
};

struct Variable {
  double lower = -kInfinity;
  double upper = kInfinity;
};

/// Solver-agnostic conic program: minimize a linear objective subject to linear
/// rows, variable bounds, exponential-cone triples and second-order cones.
class ConicProgram {
 public:
  int add_variable(std::string name = {}, double lower = -kInfinity, double upper = kInfinity);
  int add_variables(int count, double lower = -kInfinity, double upper = kInfinity);
  void set_bounds(int var, double lower, double upper);
  void set_name(int var, std::string name);

  void set_objective(AffineExpr objective) { objective_ = std::move(objective); }
  void add_to_objective(int var, double coef) { objective_.add(var, coef); }

  int add_row(AffineExpr expr, RowSense sense);
  int add_exp_cone(AffineExpr a, AffineExpr b, AffineExpr c);
  int add_second_order_cone(AffineExpr t, std::vector<AffineExpr> x);

  int num_variables() const { return static_cast<int>(variables_.size()); }
  const std::vector<Variable>& variables() const { return variables_; }
  std::string variable_name(int var) const;
  int find_variable(const std::string& name) const;

  const AffineExpr& objective() const { return objective_; }
  const std::vector<LinearRow>& rows() const { return rows_; }
  const std::vector<ExpConeTriple>& exp_cones() const { return exp_cones_; }
  const std::vector<SecondOrderCone>& second_order_cones() const { return socs_; }

  /// Optional starting point hint; ignored by the solver unless strictly interior.
  void set_initial_point(std::vector<double> x) { initial_point_ = std::move(x); }
  const std::vector<double>& initial_point() const { return initial_point_; }

  /// Throws std::invalid_argument on references to undeclared variables,
  /// non-finite coefficients or inverted bounds.
  void validate() const;

  double evaluate_objective(std::span<const double> x) const { return objective_.evaluate(x); }

  /// Largest violation of any row, bound or cone at `x` (0 when feasible).
  /// Cone violations are measured as max(0, b*exp(c/b) - a) (or the SOC analogue).
  double max_violation(std::span<const double> x) const;

  /// Human-readable dump: one line per variable, row and cone.
  void write_text(std::ostream& os) const;
  std::string to_text() const;

 private:
  std::vector<Variable> variables_;
  std::vector<std::string> names_;  // empty entries fall back to "x<i>"
  AffineExpr objective_;
  std::vector<LinearRow> rows_;
  std::vector<ExpConeTriple> exp_cones_;
  std::vector<SecondOrderCone> socs_;
  std::vector<double> initial_point_;
};

}  // namespace wdro
