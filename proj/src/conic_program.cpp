#include "wdro/conic_program.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wdro {

AffineExpr& AffineExpr::operator+=(const AffineExpr& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  constant_ += other.constant_;
  return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& other) {
  terms_.reserve(terms_.size() + other.terms_.size());
  for (const auto& t : other.terms_) terms_.push_back({t.var, -t.coef});
  constant_ -= other.constant_;
  return *this;
}

AffineExpr& AffineExpr::operator*=(double scale) {
  for (auto& t : terms_) t.coef *= scale;
  constant_ *= scale;
  return *this;
}

void AffineExpr::compress() {
  if (terms_.size() < 2) {
    std::erase_if(terms_, [](const LinearTerm& t) { return t.coef == 0.0; });
    return;
  }
  std::sort(terms_.begin(), terms_.end(),
            [](const LinearTerm& l, const LinearTerm& r) { return l.var < r.var; });
  std::size_t out = 0;
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    if (out > 0 && terms_[out - 1].var == terms_[k].var) {
      terms_[out - 1].coef += terms_[k].coef;
    } else {
      terms_[out++] = terms_[k];
    }
  }
  terms_.resize(out);
  std::erase_if(terms_, [](const LinearTerm& t) { return t.coef == 0.0; });
}

double AffineExpr::evaluate(std::span<const double> x) const {
  double v = constant_;
  for (const auto& t : terms_) v += t.coef * x[static_cast<std::size_t>(t.var)];
  return v;
}

int ConicProgram::add_variable(std::string name, double lower, double upper) {
  variables_.push_back({lower, upper});
  names_.push_back(std::move(name));
  return num_variables() - 1;
}

int ConicProgram::add_variables(int count, double lower, double upper) {
  const int first = num_variables();
  variables_.resize(variables_.size() + static_cast<std::size_t>(count), Variable{lower, upper});
  names_.resize(variables_.size());
  return first;
}

void ConicProgram::set_bounds(int var, double lower, double upper) {
  variables_.at(static_cast<std::size_t>(var)) = {lower, upper};
}

void ConicProgram::set_name(int var, std::string name) {
  names_.at(static_cast<std::size_t>(var)) = std::move(name);
}

int ConicProgram::add_row(AffineExpr expr, RowSense sense) {
  expr.compress();
  rows_.push_back({std::move(expr), sense});
  return static_cast<int>(rows_.size()) - 1;
}

int ConicProgram::add_exp_cone(AffineExpr a, AffineExpr b, AffineExpr c) {
  a.compress();
  b.compress();
  c.compress();
  exp_cones_.push_back({std::move(a), std::move(b), std::move(c)});
  return static_cast<int>(exp_cones_.size()) - 1;
}

int ConicProgram::add_second_order_cone(AffineExpr t, std::vector<AffineExpr> x) {
  t.compress();
  for (auto& e : x) e.compress();
  socs_.push_back({std::move(t), std::move(x)});
  return static_cast<int>(socs_.size()) - 1;
}

std::string ConicProgram::variable_name(int var) const {
  const auto& n = names_.at(static_cast<std::size_t>(var));
  return n.empty() ? "x" + std::to_string(var) : n;
}

int ConicProgram::find_variable(const std::string& name) const {
  for (int j = 0; j < num_variables(); ++j) {
    if (variable_name(j) == name) return j;
  }
  return -1;
}

namespace {

void check_expr(const AffineExpr& e, int n, const char* what) {
  if (!std::isfinite(e.constant())) {
    throw std::invalid_argument(std::string("non-finite constant in ") + what);
  }
  for (const auto& t : e.terms()) {
    if (t.var < 0 || t.var >= n) {
      throw std::invalid_argument(std::string("undeclared variable referenced in ") + what);
    }
    if (!std::isfinite(t.coef)) {
      throw std::invalid_argument(std::string("non-finite coefficient in ") + what);
    }
  }
}

double exp_cone_violation(double a, double b, double c) {
  if (b > 0.0) {
    // a >= b exp(c/b); compare in a scale-aware way to avoid overflow.
    const double rhs = b * std::exp(c / b);
    return std::max(0.0, rhs - a);
  }
  // Closure at b = 0: {(a, 0, c) : a >= 0, c <= 0}.
  return std::max({0.0, -b, -a, c});
}

}  // namespace

void ConicProgram::validate() const {
  const int n = num_variables();
  for (const auto& v : variables_) {
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper) {
      throw std::invalid_argument("invalid variable bounds");
    }
  }
  check_expr(objective_, n, "objective");
  for (const auto& r : rows_) check_expr(r.expr, n, "linear row");
  for (const auto& k : exp_cones_) {
    check_expr(k.a, n, "exponential cone");
    check_expr(k.b, n, "exponential cone");
    check_expr(k.c, n, "exponential cone");
  }
  for (const auto& q : socs_) {
    check_expr(q.t, n, "second-order cone");
    for (const auto& e : q.x) check_expr(e, n, "second-order cone");
  }
}

double ConicProgram::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < variables_.size(); ++j) {
    worst = std::max({worst, variables_[j].lower - x[j], x[j] - variables_[j].upper});
  }
  for (const auto& r : rows_) {
    const double v = r.expr.evaluate(x);
    switch (r.sense) {
      case RowSense::LessEqual: worst = std::max(worst, v); break;
      case RowSense::GreaterEqual: worst = std::max(worst, -v); break;
      case RowSense::Equal: worst = std::max(worst, std::abs(v)); break;
    }
  }
  for (const auto& k : exp_cones_) {
    worst = std::max(worst, exp_cone_violation(k.a.evaluate(x), k.b.evaluate(x), k.c.evaluate(x)));
  }
  for (const auto& q : socs_) {
    double sq = 0.0;
    for (const auto& e : q.x) {
      const double v = e.evaluate(x);
      sq += v * v;
    }
    worst = std::max(worst, std::sqrt(sq) - q.t.evaluate(x));
  }
  return std::max(worst, 0.0);
}

namespace {

void write_expr(std::ostream& os, const AffineExpr& e, const ConicProgram& p) {
  os << (e.constant() == 0.0 ? 0.0 : e.constant());  // no "-0"
  for (const auto& t : e.terms()) {
    os << (t.coef < 0 ? " - " : " + ") << std::abs(t.coef) << "*" << p.variable_name(t.var);
  }
}

const char* sense_token(RowSense s) {
  switch (s) {
    case RowSense::LessEqual: return "<=";
    case RowSense::GreaterEqual: return ">=";
    case RowSense::Equal: return "==";
  }
  return "?";
}

}  // namespace

void ConicProgram::write_text(std::ostream& os) const {
  const auto old_precision = os.precision(17);
  os << "conic_program\n";
  os << "variables " << num_variables() << "\n";
  for (int j = 0; j < num_variables(); ++j) {
    os << "var " << j << " " << variable_name(j) << " " << variables_[j].lower << " "
       << variables_[j].upper << "\n";
  }
  os << "objective min ";
  write_expr(os, objective_, *this);
  os << "\n";
  os << "rows " << rows_.size() << "\n";
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    os << "row " << r << " ";
    write_expr(os, rows_[r].expr, *this);
    os << " " << sense_token(rows_[r].sense) << " 0\n";
  }
  os << "exp_cones " << exp_cones_.size() << "\n";
  for (std::size_t k = 0; k < exp_cones_.size(); ++k) {
    os << "exp " << k << " a: ";
    write_expr(os, exp_cones_[k].a, *this);
    os << " | b: ";
    write_expr(os, exp_cones_[k].b, *this);
    os << " | c: ";
    write_expr(os, exp_cones_[k].c, *this);
    os << "\n";
  }
  os << "soc_cones " << socs_.size() << "\n";
  for (std::size_t k = 0; k < socs_.size(); ++k) {
    os << "soc " << k << " t: ";
    write_expr(os, socs_[k].t, *this);
    for (const auto& e : socs_[k].x) {
      os << " | x: ";
      write_expr(os, e, *this);
    }
    os << "\n";
  }
  os.precision(old_precision);
}

std::string ConicProgram::to_text() const {
  std::ostringstream os;
  write_text(os);
  return os.str();
}

}  // namespace wdro
