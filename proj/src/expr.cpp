#include "fkgeo/expr.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace fkgeo {

// ---------------------------------------------------------------------------
// Expression trees
// ---------------------------------------------------------------------------

ExprPtr ScalarExpr::constant(double v) {
  auto e = std::make_shared<ScalarExpr>();
  e->kind = ExprKind::Constant;
  e->value = v;
  return e;
}

ExprPtr ScalarExpr::coordinate(int index) {
  auto e = std::make_shared<ScalarExpr>();
  e->kind = ExprKind::Coordinate;
  e->coord = index;
  return e;
}

ExprPtr ScalarExpr::make(ExprKind k, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<ScalarExpr>();
  e->kind = k;
  e->lhs = std::move(a);
  e->rhs = std::move(b);
  return e;
}

ExprPtr ScalarExpr::int_pow(ExprPtr base, int exponent) {
  auto e = std::make_shared<ScalarExpr>();
  e->kind = ExprKind::IntPow;
  e->exponent = exponent;
  e->lhs = std::move(base);
  return e;
}

int ScalarExpr::max_coord() const {
  int m = coord;
  if (lhs) m = std::max(m, lhs->max_coord());
  if (rhs) m = std::max(m, rhs->max_coord());
  return m;
}

namespace {

bool is_const(const ExprPtr& e, double v) {
  return e->kind == ExprKind::Constant && e->value == v;
}

}  // namespace

ExprPtr operator+(const ExprPtr& a, const ExprPtr& b) {
  if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant)
    return ScalarExpr::constant(a->value + b->value);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return ScalarExpr::make(ExprKind::Add, a, b);
}

ExprPtr operator-(const ExprPtr& a, const ExprPtr& b) {
  if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant)
    return ScalarExpr::constant(a->value - b->value);
  if (is_const(b, 0.0)) return a;
  return ScalarExpr::make(ExprKind::Sub, a, b);
}

ExprPtr operator*(const ExprPtr& a, const ExprPtr& b) {
  if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant)
    return ScalarExpr::constant(a->value * b->value);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return ScalarExpr::constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return ScalarExpr::make(ExprKind::Mul, a, b);
}

ExprPtr operator/(const ExprPtr& a, const ExprPtr& b) {
  if (is_const(b, 1.0)) return a;
  return ScalarExpr::make(ExprKind::Div, a, b);
}

ExprPtr operator-(const ExprPtr& a) {
  if (a->kind == ExprKind::Constant) return ScalarExpr::constant(-a->value);
  return ScalarExpr::make(ExprKind::Neg, a);
}

ExprPtr operator+(double a, const ExprPtr& b) { return ScalarExpr::constant(a) + b; }
ExprPtr operator+(const ExprPtr& a, double b) { return a + ScalarExpr::constant(b); }
ExprPtr operator-(double a, const ExprPtr& b) { return ScalarExpr::constant(a) - b; }
ExprPtr operator-(const ExprPtr& a, double b) { return a - ScalarExpr::constant(b); }
ExprPtr operator*(double a, const ExprPtr& b) { return ScalarExpr::constant(a) * b; }
ExprPtr operator*(const ExprPtr& a, double b) { return a * ScalarExpr::constant(b); }
ExprPtr operator/(double a, const ExprPtr& b) { return ScalarExpr::constant(a) / b; }
ExprPtr operator/(const ExprPtr& a, double b) { return a / ScalarExpr::constant(b); }

ExprPtr exp(const ExprPtr& a) { return ScalarExpr::make(ExprKind::Exp, a); }
ExprPtr log(const ExprPtr& a) { return ScalarExpr::make(ExprKind::Log, a); }
ExprPtr tanh(const ExprPtr& a) { return ScalarExpr::make(ExprKind::Tanh, a); }
ExprPtr pow_i(const ExprPtr& base, int exponent) {
  if (exponent == 1) return base;
  return ScalarExpr::int_pow(base, exponent);
}

std::string ScalarExpr::to_string(std::span<const std::string> names) const {
  std::ostringstream os;
  auto name = [&](int i) -> std::string {
    if (i >= 0 && i < static_cast<int>(names.size())) return names[static_cast<std::size_t>(i)];
    return "c" + std::to_string(i);
  };
  switch (kind) {
    case ExprKind::Constant: os << value; break;
    case ExprKind::Coordinate: os << name(coord); break;
    case ExprKind::Add: os << "(" << lhs->to_string(names) << " + " << rhs->to_string(names) << ")"; break;
    case ExprKind::Sub: os << "(" << lhs->to_string(names) << " - " << rhs->to_string(names) << ")"; break;
    case ExprKind::Mul: os << "(" << lhs->to_string(names) << " * " << rhs->to_string(names) << ")"; break;
    case ExprKind::Div: os << "(" << lhs->to_string(names) << " / " << rhs->to_string(names) << ")"; break;
    case ExprKind::Neg: os << "(-" << lhs->to_string(names) << ")"; break;
    case ExprKind::IntPow: os << lhs->to_string(names) << "^" << exponent; break;
    case ExprKind::Exp: os << "exp(" << lhs->to_string(names) << ")"; break;
    case ExprKind::Log: os << "ln(" << lhs->to_string(names) << ")"; break;
    case ExprKind::Tanh: os << "tanh(" << lhs->to_string(names) << ")"; break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// JetSpace
// ---------------------------------------------------------------------------

namespace {

std::uint32_t pack_add(std::uint32_t a, std::uint32_t b) { return a + b; }

int packed_degree(std::uint32_t p, int nvars) {
  int d = 0;
  for (int v = 0; v < nvars; ++v) d += static_cast<int>((p >> (2 * v)) & 0x3u);
  return d;
}

}  // namespace

JetSpace::JetSpace(int nvars, int order) : nvars_(nvars), order_(order) {
  if (nvars < 0 || nvars > kMaxJetVars)
    throw InvalidParam("jet variable count out of range: " + std::to_string(nvars));
  if (order < 0 || order > kMaxJetOrder)
    throw InvalidParam("jet order out of range: " + std::to_string(order));

  // Enumerate packed exponent vectors of total degree <= order, graded.
  std::vector<std::uint32_t> cur{0u};
  monomials_.push_back(0u);
  for (int d = 1; d <= order; ++d) {
    std::vector<std::uint32_t> next;
    for (std::uint32_t mono : cur) {
      // Raise only variables >= the highest raised one to avoid duplicates.
      int hi = 0;
      for (int v = nvars - 1; v >= 0; --v) {
        if (((mono >> (2 * v)) & 0x3u) != 0) {
          hi = v;
          break;
        }
      }
      if (mono == 0u) hi = 0;
      for (int v = hi; v < nvars; ++v)
        next.push_back(mono + (1u << (2 * v)));
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    for (std::uint32_t mono : next) monomials_.push_back(mono);
    cur = std::move(next);
  }

  const int n = size();
  degree_.resize(static_cast<std::size_t>(n));
  factorial_.resize(static_cast<std::size_t>(n));
  std::unordered_map<std::uint32_t, int> pos;
  pos.reserve(static_cast<std::size_t>(n) * 2);
  for (int i = 0; i < n; ++i) {
    const std::uint32_t mono = monomials_[static_cast<std::size_t>(i)];
    pos[mono] = i;
    degree_[static_cast<std::size_t>(i)] = packed_degree(mono, nvars);
    double f = 1.0;
    for (int v = 0; v < nvars; ++v) {
      const int e = static_cast<int>((mono >> (2 * v)) & 0x3u);
      for (int k = 2; k <= e; ++k) f *= k;
    }
    factorial_[static_cast<std::size_t>(i)] = f;
  }

  product_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (degree_[static_cast<std::size_t>(i)] + degree_[static_cast<std::size_t>(j)] > order) continue;
      const std::uint32_t m = pack_add(monomials_[static_cast<std::size_t>(i)],
                                       monomials_[static_cast<std::size_t>(j)]);
      auto it = pos.find(m);
      product_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
               static_cast<std::size_t>(j)] = (it == pos.end()) ? -1 : it->second;
    }
  }

  raise_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(nvars), -1);
  for (int i = 0; i < n; ++i) {
    for (int v = 0; v < nvars; ++v) {
      if (degree_[static_cast<std::size_t>(i)] + 1 > order) continue;
      const std::uint32_t m = monomials_[static_cast<std::size_t>(i)] + (1u << (2 * v));
      auto it = pos.find(m);
      if (it != pos.end())
        raise_[static_cast<std::size_t>(i) * static_cast<std::size_t>(nvars) +
               static_cast<std::size_t>(v)] = it->second;
    }
  }

  pos_ = std::move(pos);
}

int JetSpace::position(std::uint32_t packed) const {
  auto it = pos_.find(packed);
  return it == pos_.end() ? -1 : it->second;
}

const JetSpace& JetSpace::get(int nvars, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<JetSpace>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(nvars, order);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::unique_ptr<JetSpace>(new JetSpace(nvars, order))).first;
  }
  return *it->second;
}

// ---------------------------------------------------------------------------
// Jet arithmetic
// ---------------------------------------------------------------------------

Jet Jet::constant(const JetSpace& sp, double v) {
  Jet j(sp);
  j.c_[0] = v;
  return j;
}

Jet Jet::variable(const JetSpace& sp, int var, double v) {
  Jet j(sp);
  j.c_[0] = v;
  if (sp.order() >= 1) {
    const int p = sp.position(1u << (2 * var));
    j.c_[static_cast<std::size_t>(p)] = 1.0;
  }
  return j;
}

double Jet::partial(std::span<const int> dirs) const {
  std::uint32_t packed = 0;
  for (int v : dirs) packed += 1u << (2 * v);
  const int p = space_->position(packed);
  if (p < 0) throw InvalidParam("partial order exceeds jet order");
  return c_[static_cast<std::size_t>(p)] * space_->factorial(p);
}

Jet Jet::truncated(int order) const {
  const JetSpace& sp = JetSpace::get(space_->nvars(), order);
  Jet out(sp);
  for (int i = 0; i < sp.size(); ++i) out.c_[static_cast<std::size_t>(i)] = c_[static_cast<std::size_t>(i)];
  return out;
}

Jet Jet::deriv(int var) const {
  const JetSpace& lo = JetSpace::get(space_->nvars(), space_->order() - 1);
  Jet out(lo);
  for (int i = 0; i < lo.size(); ++i) {
    const int up = space_->raise_index(i, var);
    if (up >= 0) {
      const int e = space_->exponent_of(up, var);
      out.c_[static_cast<std::size_t>(i)] = c_[static_cast<std::size_t>(up)] * e;
    }
  }
  return out;
}

namespace {

// Align two jets to a common space (same nvars, min order).
void align(const Jet& a, const Jet& b, Jet& oa, Jet& ob) {
  const int oa_ord = a.space().order(), ob_ord = b.space().order();
  if (oa_ord == ob_ord) {
    oa = a;
    ob = b;
  } else if (oa_ord < ob_ord) {
    oa = a;
    ob = b.truncated(oa_ord);
  } else {
    oa = a.truncated(ob_ord);
    ob = b;
  }
}

}  // namespace

Jet Jet::operator-() const {
  Jet out = *this;
  for (double& x : out.c_) x = -x;
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.space_->order() < space_->order()) {
    *this = truncated(o.space_->order());
  }
  const std::size_t n = c_.size();
  for (std::size_t i = 0; i < n; ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (o.space_->order() < space_->order()) {
    *this = truncated(o.space_->order());
  }
  const std::size_t n = c_.size();
  for (std::size_t i = 0; i < n; ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& x : c_) x *= s;
  return *this;
}

Jet operator+(const Jet& a, const Jet& b) {
  Jet x, y;
  align(a, b, x, y);
  for (std::size_t i = 0; i < x.c_.size(); ++i) x.c_[i] += y.c_[i];
  return x;
}

Jet operator-(const Jet& a, const Jet& b) {
  Jet x, y;
  align(a, b, x, y);
  for (std::size_t i = 0; i < x.c_.size(); ++i) x.c_[i] -= y.c_[i];
  return x;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet x, y;
  align(a, b, x, y);
  const JetSpace& sp = x.space();
  const int n = sp.size();
  Jet out(sp);
  for (int i = 0; i < n; ++i) {
    const double xi = x.c_[static_cast<std::size_t>(i)];
    if (xi == 0.0) continue;
    for (int j = 0; j < n; ++j) {
      const int k = sp.product_index(i, j);
      if (k >= 0) out.c_[static_cast<std::size_t>(k)] += xi * y.c_[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

Jet operator+(const Jet& a, double b) {
  Jet out = a;
  out.c_[0] += b;
  return out;
}
Jet operator+(double a, const Jet& b) { return b + a; }
Jet operator-(const Jet& a, double b) { return a + (-b); }
Jet operator-(double a, const Jet& b) {
  Jet out = -b;
  out.c_[0] += a;
  return out;
}
Jet operator*(const Jet& a, double b) {
  Jet out = a;
  out *= b;
  return out;
}
Jet operator*(double a, const Jet& b) { return b * a; }
Jet operator/(const Jet& a, double b) {
  if (b == 0.0) throw DomainError("division by zero constant");
  return a * (1.0 / b);
}

namespace {

// f(u) = sum_j d[j] (u - u0)^j truncated at the jet order, where
// d[j] = f^(j)(u0) / j!.
Jet compose_series(const Jet& u, const std::array<double, kMaxJetOrder + 1>& d) {
  const JetSpace& sp = u.space();
  const int order = sp.order();
  Jet du = u;
  du.coeff(0) = 0.0;
  Jet acc = Jet::constant(sp, d[0]);
  Jet p = du;
  for (int j = 1; j <= order; ++j) {
    acc += p * d[static_cast<std::size_t>(j)];
    if (j < order) p = p * du;
  }
  return acc;
}

}  // namespace

Jet recip(const Jet& a) {
  const double u0 = a.value();
  if (u0 == 0.0 || !std::isfinite(1.0 / u0))
    throw DomainError("division by zero in jet evaluation");
  const double i1 = 1.0 / u0;
  return compose_series(a, {i1, -i1 * i1, i1 * i1 * i1, -i1 * i1 * i1 * i1});
}

Jet operator/(const Jet& a, const Jet& b) {
  Jet x, y;
  align(a, b, x, y);
  return x * recip(y);
}

Jet operator/(double a, const Jet& b) { return recip(b) * a; }

Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  return compose_series(a, {e, e, e / 2.0, e / 6.0});
}

Jet log(const Jet& a) {
  const double u0 = a.value();
  if (!(u0 > 0.0)) throw DomainError("ln of non-positive value");
  const double i1 = 1.0 / u0;
  return compose_series(a, {std::log(u0), i1, -i1 * i1 / 2.0, i1 * i1 * i1 / 3.0});
}

Jet tanh(const Jet& a) {
  const double T = std::tanh(a.value());
  const double s = 1.0 - T * T;  // sech^2
  // f' = s, f'' = -2 T s, f''' = s (6 T^2 - 2)
  return compose_series(a, {T, s, -T * s, s * (6.0 * T * T - 2.0) / 6.0});
}

Jet pow_i(const Jet& a, int exponent) {
  const JetSpace& sp = a.space();
  if (exponent == 0) return Jet::constant(sp, 1.0);
  const bool neg = exponent < 0;
  int e = neg ? -exponent : exponent;
  Jet base = a;
  Jet acc = Jet::constant(sp, 1.0);
  while (e > 0) {
    if (e & 1) acc = acc * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return neg ? recip(acc) : acc;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

Jet eval_node(const ScalarExpr& e, const JetSpace& sp,
              std::span<const double> point, std::span<const int> var_of_coord) {
  switch (e.kind) {
    case ExprKind::Constant:
      return Jet::constant(sp, e.value);
    case ExprKind::Coordinate: {
      if (e.coord < 0 || e.coord >= static_cast<int>(point.size()))
        throw DomainError("coordinate index out of range in expression");
      const int var = var_of_coord[static_cast<std::size_t>(e.coord)];
      const double v = point[static_cast<std::size_t>(e.coord)];
      return var >= 0 ? Jet::variable(sp, var, v) : Jet::constant(sp, v);
    }
    case ExprKind::Add:
      return eval_node(*e.lhs, sp, point, var_of_coord) +
             eval_node(*e.rhs, sp, point, var_of_coord);
    case ExprKind::Sub:
      return eval_node(*e.lhs, sp, point, var_of_coord) -
             eval_node(*e.rhs, sp, point, var_of_coord);
    case ExprKind::Mul:
      return eval_node(*e.lhs, sp, point, var_of_coord) *
             eval_node(*e.rhs, sp, point, var_of_coord);
    case ExprKind::Div:
      return eval_node(*e.lhs, sp, point, var_of_coord) /
             eval_node(*e.rhs, sp, point, var_of_coord);
    case ExprKind::Neg:
      return -eval_node(*e.lhs, sp, point, var_of_coord);
    case ExprKind::IntPow:
      return pow_i(eval_node(*e.lhs, sp, point, var_of_coord), e.exponent);
    case ExprKind::Exp:
      return exp(eval_node(*e.lhs, sp, point, var_of_coord));
    case ExprKind::Log:
      return log(eval_node(*e.lhs, sp, point, var_of_coord));
    case ExprKind::Tanh:
      return tanh(eval_node(*e.lhs, sp, point, var_of_coord));
  }
  throw DomainError("unreachable expression kind");
}

double eval_node_value(const ScalarExpr& e, std::span<const double> point) {
  switch (e.kind) {
    case ExprKind::Constant:
      return e.value;
    case ExprKind::Coordinate:
      if (e.coord < 0 || e.coord >= static_cast<int>(point.size()))
        throw DomainError("coordinate index out of range in expression");
      return point[static_cast<std::size_t>(e.coord)];
    case ExprKind::Add:
      return eval_node_value(*e.lhs, point) + eval_node_value(*e.rhs, point);
    case ExprKind::Sub:
      return eval_node_value(*e.lhs, point) - eval_node_value(*e.rhs, point);
    case ExprKind::Mul:
      return eval_node_value(*e.lhs, point) * eval_node_value(*e.rhs, point);
    case ExprKind::Div: {
      const double den = eval_node_value(*e.rhs, point);
      if (den == 0.0) throw DomainError("division by zero in evaluation");
      return eval_node_value(*e.lhs, point) / den;
    }
    case ExprKind::Neg:
      return -eval_node_value(*e.lhs, point);
    case ExprKind::IntPow: {
      const double b = eval_node_value(*e.lhs, point);
      if (e.exponent < 0 && b == 0.0) throw DomainError("zero to negative power");
      return std::pow(b, e.exponent);
    }
    case ExprKind::Exp:
      return std::exp(eval_node_value(*e.lhs, point));
    case ExprKind::Log: {
      const double v = eval_node_value(*e.lhs, point);
      if (!(v > 0.0)) throw DomainError("ln of non-positive value");
      return std::log(v);
    }
    case ExprKind::Tanh:
      return std::tanh(eval_node_value(*e.lhs, point));
  }
  throw DomainError("unreachable expression kind");
}

}  // namespace

Jet eval_jet(const ExprPtr& e, std::span<const double> point, int order,
             std::span<const int> dirs) {
  const JetSpace& sp = JetSpace::get(static_cast<int>(dirs.size()), order);
  std::vector<int> var_of_coord(point.size(), -1);
  for (std::size_t i = 0; i < dirs.size(); ++i)
    var_of_coord[static_cast<std::size_t>(dirs[i])] = static_cast<int>(i);
  return eval_node(*e, sp, point, var_of_coord);
}

double eval_value(const ExprPtr& e, std::span<const double> point) {
  return eval_node_value(*e, point);
}

double fd_check(const ExprPtr& e, std::span<const double> point, double h,
                std::span<const int> dirs) {
  const Jet j = eval_jet(e, point, 2, dirs);
  std::vector<double> p(point.begin(), point.end());
  const int nd = static_cast<int>(dirs.size());

  // Steps snapped to powers of two so that p +/- h carries no representation
  // error; second differences use a coarser step near the eps^(1/4) optimum,
  // below which cancellation noise would swamp the comparison.
  const double h1 = std::exp2(std::round(std::log2(h)));
  const double h2 = std::max(h1, 0x1.0p-13);

  auto at = [&](std::initializer_list<std::pair<int, double>> shifts) {
    for (auto [d, s] : shifts) p[static_cast<std::size_t>(dirs[static_cast<std::size_t>(d)])] += s;
    const double v = eval_value(e, p);
    for (auto [d, s] : shifts) p[static_cast<std::size_t>(dirs[static_cast<std::size_t>(d)])] -= s;
    return v;
  };

  const double f0 = at({});
  double worst = 0.0;
  auto rel = [](double a, double b) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) / scale;
  };

  for (int a = 0; a < nd; ++a) {
    const double fd1 = (at({{a, h1}}) - at({{a, -h1}})) / (2.0 * h1);
    worst = std::max(worst, rel(j.partial({a}), fd1));
    const double fd2 = (at({{a, h2}}) - 2.0 * f0 + at({{a, -h2}})) / (h2 * h2);
    worst = std::max(worst, rel(j.partial({a, a}), fd2));
    for (int b = a + 1; b < nd; ++b) {
      const double fmix = (at({{a, h2}, {b, h2}}) - at({{a, h2}, {b, -h2}}) -
                           at({{a, -h2}, {b, h2}}) + at({{a, -h2}, {b, -h2}})) /
                          (4.0 * h2 * h2);
      worst = std::max(worst, rel(j.partial({a, b}), fmix));
    }
  }
  return worst;
}

}  // namespace fkgeo
