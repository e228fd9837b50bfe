#pragma once

#include <optional>
#include <string>

#include "fkgeo/chart.hpp"
#include "fkgeo/expr.hpp"
#include "fkgeo/fields.hpp"

namespace fkgeo {

// The warp-generating function f(t) together with a closed-form potential
// W with W' = f. Families are the ones that admit such a potential:
//   constant            f = beta,          W = beta t
//   exponential         f = a e^{ct},      W = (a/c) e^{ct}
//   affine_exponential  f = a + b e^{ct},  W = a t + (b/c) e^{ct}
//   reciprocal          f = 1/(t + t0),    W = ln(t + t0)
// The reciprocal family has f^2 + f' = 0 identically: the canonical
// non-regular witness.
enum class FFamily { Constant, Exponential, AffineExponential, Reciprocal };

struct KenmotsuFunction {
  FFamily family = FFamily::Constant;
  double beta = 1.0;           // Constant
  double a = 0.0, b = 0.0, c = 0.0;  // Exponential / AffineExponential
  double t0 = 0.0;             // Reciprocal

  ExprPtr f;       // f(t)
  ExprPtr warp;    // e^{2W(t)}, exact per family
  ExprPtr W;       // potential, W' = f

  static KenmotsuFunction constant(double beta);
  static KenmotsuFunction exponential(double a, double c);
  static KenmotsuFunction affine_exponential(double a, double b, double c);
  static KenmotsuFunction reciprocal(double t0);

  bool is_constant_one() const {
    return family == FFamily::Constant && beta == 1.0;
  }
  std::string describe() const;
};

struct ContactStructure {
  Tensor11Expr phi;
  VectorFieldExpr xi;
  OneFormExpr eta;
};

// A coordinate model: chart + metric, optionally carrying an almost contact
// structure and a Kenmotsu function (control models like "flat" have
// neither). n = (m-1)/2 for contact models.
struct Model {
  std::string name;
  Chart chart;
  MetricField g;
  int n = 0;
  std::optional<ContactStructure> contact;
  std::optional<KenmotsuFunction> fkf;
  std::optional<double> fiber_k;  // curved-fiber curvature (n = 1 only)
  double regularity_margin = 0.0; // min |f^2 + f'| over t samples
  bool regular = false;

  int m() const { return chart.dim(); }
  bool has_contact() const { return contact.has_value(); }

  Point center() const {
    Point p(static_cast<std::size_t>(m()));
    for (int i = 0; i < m(); ++i)
      p[static_cast<std::size_t>(i)] =
          0.5 * (chart.box[static_cast<std::size_t>(i)].first +
                 chart.box[static_cast<std::size_t>(i)].second);
    return p;
  }
};

}  // namespace fkgeo
