#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fkgeo/errors.hpp"

namespace fkgeo {

// ---------------------------------------------------------------------------
// Expression trees over chart coordinates.
//
// Closed under: constants, coordinates, +, -, *, /, integer powers, exp, ln,
// tanh. Trees are immutable and shared; evaluation is pure.
// ---------------------------------------------------------------------------

class ScalarExpr;
using ExprPtr = std::shared_ptr<const ScalarExpr>;

enum class ExprKind {
  Constant,
  Coordinate,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  IntPow,
  Exp,
  Log,
  Tanh,
};

class ScalarExpr {
 public:
  ExprKind kind;
  double value = 0.0;  // Constant
  int coord = -1;      // Coordinate index into the chart's coordinate list
  int exponent = 0;    // IntPow
  ExprPtr lhs, rhs;    // children; rhs empty for unary nodes

  static ExprPtr constant(double v);
  static ExprPtr coordinate(int index);
  static ExprPtr make(ExprKind k, ExprPtr a, ExprPtr b = nullptr);
  static ExprPtr int_pow(ExprPtr base, int exponent);

  // Largest coordinate index referenced, or -1 for coordinate-free trees.
  int max_coord() const;

  std::string to_string(std::span<const std::string> coord_names = {}) const;
};

ExprPtr operator+(const ExprPtr& a, const ExprPtr& b);
ExprPtr operator-(const ExprPtr& a, const ExprPtr& b);
ExprPtr operator*(const ExprPtr& a, const ExprPtr& b);
ExprPtr operator/(const ExprPtr& a, const ExprPtr& b);
ExprPtr operator-(const ExprPtr& a);

ExprPtr operator+(double a, const ExprPtr& b);
ExprPtr operator+(const ExprPtr& a, double b);
ExprPtr operator-(double a, const ExprPtr& b);
ExprPtr operator-(const ExprPtr& a, double b);
ExprPtr operator*(double a, const ExprPtr& b);
ExprPtr operator*(const ExprPtr& a, double b);
ExprPtr operator/(double a, const ExprPtr& b);
ExprPtr operator/(const ExprPtr& a, double b);

ExprPtr exp(const ExprPtr& a);
ExprPtr log(const ExprPtr& a);
ExprPtr tanh(const ExprPtr& a);
ExprPtr pow_i(const ExprPtr& base, int exponent);

// ---------------------------------------------------------------------------
// Truncated multivariate Taylor jets (order <= 3).
//
// A Jet stores the Taylor coefficients of a function at a base point with
// respect to a declared set of directions. Arithmetic on jets is exact to
// machine rounding: no truncation error enters derivative values, which is
// what keeps curvature residual tolerances in the 1e-8 class.
// ---------------------------------------------------------------------------

inline constexpr int kMaxJetOrder = 3;
inline constexpr int kMaxJetVars = 15;

class JetSpace {
 public:
  static const JetSpace& get(int nvars, int order);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(monomials_.size()); }

  int degree(int idx) const { return degree_[static_cast<std::size_t>(idx)]; }
  int exponent_of(int idx, int var) const {
    return static_cast<int>(
        (monomials_[static_cast<std::size_t>(idx)] >> (2 * var)) & 0x3u);
  }
  // Position of the monomial with exponents given by `packed`, or -1.
  int position(std::uint32_t packed) const;
  // Index of monomial i * monomial j, or -1 if the degree exceeds the order.
  int product_index(int i, int j) const {
    return product_[static_cast<std::size_t>(i) *
                        static_cast<std::size_t>(size()) +
                    static_cast<std::size_t>(j)];
  }
  // Monomial index with the exponent of `var` raised by one, or -1.
  int raise_index(int idx, int var) const {
    return raise_[static_cast<std::size_t>(idx) *
                      static_cast<std::size_t>(nvars_) +
                  static_cast<std::size_t>(var)];
  }
  // alpha! for converting Taylor coefficients to raw partial derivatives.
  double factorial(int idx) const {
    return factorial_[static_cast<std::size_t>(idx)];
  }

 private:
  JetSpace(int nvars, int order);

  int nvars_, order_;
  std::vector<std::uint32_t> monomials_;  // packed exponents, graded order
  std::vector<int> degree_;
  std::vector<int> product_;
  std::vector<int> raise_;
  std::vector<double> factorial_;
  std::unordered_map<std::uint32_t, int> pos_;
};

class Jet {
 public:
  Jet() : space_(nullptr) {}
  explicit Jet(const JetSpace& sp)
      : space_(&sp), c_(static_cast<std::size_t>(sp.size()), 0.0) {}

  static Jet constant(const JetSpace& sp, double v);
  // Seed jet for the variable with index `var`, base value `v`.
  static Jet variable(const JetSpace& sp, int var, double v);

  const JetSpace& space() const { return *space_; }
  bool valid() const { return space_ != nullptr; }

  double value() const { return c_[0]; }
  // Raw mixed partial for the listed directions, e.g. partial({0,0,1}).
  double partial(std::span<const int> dirs) const;
  double partial(std::initializer_list<int> dirs) const {
    return partial(std::span<const int>(dirs.begin(), dirs.size()));
  }

  double coeff(int idx) const { return c_[static_cast<std::size_t>(idx)]; }
  double& coeff(int idx) { return c_[static_cast<std::size_t>(idx)]; }

  // Copy truncated to a lower order over the same variables.
  Jet truncated(int order) const;
  // d/dx_var as a jet of one order less.
  Jet deriv(int var) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);

  friend Jet operator+(const Jet& a, const Jet& b);
  friend Jet operator-(const Jet& a, const Jet& b);
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator+(const Jet& a, double b);
  friend Jet operator+(double a, const Jet& b);
  friend Jet operator-(const Jet& a, double b);
  friend Jet operator-(double a, const Jet& b);
  friend Jet operator*(const Jet& a, double b);
  friend Jet operator*(double a, const Jet& b);
  friend Jet operator/(const Jet& a, double b);
  friend Jet operator/(double a, const Jet& b);

  friend Jet exp(const Jet& a);
  friend Jet log(const Jet& a);
  friend Jet tanh(const Jet& a);
  friend Jet recip(const Jet& a);
  friend Jet pow_i(const Jet& a, int exponent);

 private:
  const JetSpace* space_;
  std::vector<double> c_;
};

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

// Evaluate `e` at `point` as a jet of the given order with respect to the
// coordinates listed in `dirs` (jet variable i corresponds to coordinate
// dirs[i]); coordinates not listed are held constant.
// Throws DomainError when evaluation leaves the expression's domain.
Jet eval_jet(const ExprPtr& e, std::span<const double> point, int order,
             std::span<const int> dirs);

// Plain value evaluation (order-0 jet fast path).
double eval_value(const ExprPtr& e, std::span<const double> point);

// Max relative discrepancy between jet partials (orders 1 and 2) and central
// finite differences with step h, over the listed directions. This is the
// independent differentiation oracle for the whole pipeline.
double fd_check(const ExprPtr& e, std::span<const double> point, double h,
                std::span<const int> dirs);

}  // namespace fkgeo
