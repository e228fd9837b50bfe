#include "fkgeo/kenmotsu.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "fkgeo/curvature.hpp"

namespace fkgeo {

namespace {

ExprPtr tc() { return ScalarExpr::coordinate(0); }

}  // namespace

// ---------------------------------------------------------------------------
// Kenmotsu function families
// ---------------------------------------------------------------------------

KenmotsuFunction KenmotsuFunction::constant(double beta) {
  if (!(beta > 0.0)) throw InvalidParam("beta must be positive");
  KenmotsuFunction k;
  k.family = FFamily::Constant;
  k.beta = beta;
  k.f = ScalarExpr::constant(beta);
  k.W = beta * tc();
  k.warp = fkgeo::exp(2.0 * beta * tc());
  return k;
}

KenmotsuFunction KenmotsuFunction::exponential(double a, double c) {
  if (c == 0.0) throw InvalidParam("exponential family needs c != 0 (use constant)");
  KenmotsuFunction k;
  k.family = FFamily::Exponential;
  k.a = a;
  k.c = c;
  k.f = a * fkgeo::exp(c * tc());
  k.W = (a / c) * fkgeo::exp(c * tc());
  k.warp = fkgeo::exp((2.0 * a / c) * fkgeo::exp(c * tc()));
  return k;
}

KenmotsuFunction KenmotsuFunction::affine_exponential(double a, double b, double c) {
  if (b == 0.0) return constant(a);
  if (c == 0.0) throw InvalidParam("affine-exponential family needs c != 0");
  KenmotsuFunction k;
  k.family = FFamily::AffineExponential;
  k.a = a;
  k.b = b;
  k.c = c;
  k.f = a + b * fkgeo::exp(c * tc());
  k.W = a * tc() + (b / c) * fkgeo::exp(c * tc());
  k.warp = fkgeo::exp(2.0 * a * tc() + (2.0 * b / c) * fkgeo::exp(c * tc()));
  return k;
}

KenmotsuFunction KenmotsuFunction::reciprocal(double t0) {
  KenmotsuFunction k;
  k.family = FFamily::Reciprocal;
  k.t0 = t0;
  k.f = 1.0 / (tc() + t0);
  k.W = fkgeo::log(tc() + t0);
  // e^{2 ln(t+t0)} = (t+t0)^2 exactly; keeps the metric free of logs.
  k.warp = pow_i(tc() + t0, 2);
  return k;
}

std::string KenmotsuFunction::describe() const {
  std::ostringstream os;
  switch (family) {
    case FFamily::Constant: os << "f = " << beta; break;
    case FFamily::Exponential: os << "f = " << a << "*exp(" << c << "*t)"; break;
    case FFamily::AffineExponential:
      os << "f = " << a << " + " << b << "*exp(" << c << "*t)";
      break;
    case FFamily::Reciprocal: os << "f = 1/(t + " << t0 << ")"; break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

namespace {

// Fiber complex structure on coordinates x1..x2n (indices 1..2n of the
// chart): J maps d/dx_{2i-1} -> d/dx_{2i} for the flat fiber; on the curved
// surface fiber (n = 1) the frame (dx, e^{-qx} dy) rotation gives
// J dx = e^{-qx} dy, J dy = -e^{qx} dx with q = sqrt(-k).
Tensor11Expr fiber_complex_structure(int m, const FiberSpec& fiber) {
  Tensor11Expr phi = Tensor11Expr::zero(m);
  if (!fiber.curved) {
    for (int i = 1; i + 1 < m; i += 2) {
      phi.set(i + 1, i, ScalarExpr::constant(1.0));
      phi.set(i, i + 1, ScalarExpr::constant(-1.0));
    }
    return phi;
  }
  const double q = std::sqrt(-fiber.k);
  ExprPtr x = ScalarExpr::coordinate(1);
  phi.set(2, 1, fkgeo::exp(-q * x));
  phi.set(1, 2, -fkgeo::exp(q * x));
  return phi;
}

void check_f_positive(const KenmotsuFunction& kf, std::pair<double, double> t_interval) {
  const int probes = 64;
  for (int i = 0; i <= probes; ++i) {
    const double t =
        t_interval.first + (t_interval.second - t_interval.first) * i / probes;
    Point p{t};
    if (!(eval_value(kf.f, p) > 0.0))
      throw InvalidParam("f must be strictly positive on the t-interval (" +
                         kf.describe() + " fails at t = " + std::to_string(t) + ")");
  }
}

// min |f^2 + f'| over the t-interval.
double regularity_margin(const KenmotsuFunction& kf, std::pair<double, double> t_interval) {
  const int probes = 128;
  const std::vector<int> dirs{0};
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= probes; ++i) {
    const double t =
        t_interval.first + (t_interval.second - t_interval.first) * i / probes;
    Point p{t};
    Jet j = eval_jet(kf.f, p, 1, dirs);
    const double v = j.value() * j.value() + j.partial({0});
    margin = std::min(margin, std::abs(v));
  }
  return margin;
}

Model build_warped(int n, const KenmotsuFunction& kf, const FiberSpec& fiber,
                   std::pair<double, double> t_interval, const std::string& name) {
  if (n < 1) throw InvalidParam("n must be >= 1");
  if (fiber.curved && n != 1)
    throw InvalidParam("curved fibers are only available for n = 1");
  if (fiber.curved && !(fiber.k < 0.0))
    throw InvalidParam("fiber curvature must be negative");
  const int m = 2 * n + 1;
  if (m > kMaxJetVars) throw InvalidParam("dimension too large");
  check_f_positive(kf, t_interval);

  Model model;
  model.name = name;
  model.n = n;
  model.chart = Chart::make(m, t_interval, {-1.0, 1.0});
  if (kf.family == FFamily::Reciprocal) {
    // Warp vanishes at t = -t0; keep integration away from the apex.
    model.chart.hard_box[0].first = -kf.t0 + 1e-3;
  }

  MetricField g = MetricField::zero(m);
  g.set(0, 0, ScalarExpr::constant(1.0));
  if (!fiber.curved) {
    for (int i = 1; i < m; ++i) g.set(i, i, kf.warp);
  } else {
    const double q = std::sqrt(-fiber.k);
    g.set(1, 1, kf.warp);
    g.set(2, 2, kf.warp * fkgeo::exp(2.0 * q * ScalarExpr::coordinate(1)));
    model.fiber_k = fiber.k;
  }
  model.g = std::move(g);

  ContactStructure cs;
  cs.xi = VectorFieldExpr::zero(m);
  cs.xi.comp[0] = ScalarExpr::constant(1.0);
  cs.eta = OneFormExpr::zero(m);
  cs.eta.comp[0] = ScalarExpr::constant(1.0);
  cs.phi = fiber_complex_structure(m, fiber);
  model.contact = std::move(cs);

  model.fkf = kf;
  model.regularity_margin = regularity_margin(kf, t_interval);
  model.regular = model.regularity_margin > 1e-6;
  return model;
}

}  // namespace

Model build_beta_kenmotsu(int n, double beta, FiberSpec fiber,
                          std::pair<double, double> t_interval) {
  if (!(beta > 0.0)) throw InvalidParam("beta must be positive");
  std::ostringstream name;
  name << "beta_kenmotsu(n=" << n << ",beta=" << beta
       << (fiber.curved ? ",k=" + std::to_string(fiber.k) : "") << ")";
  return build_warped(n, KenmotsuFunction::constant(beta), fiber, t_interval, name.str());
}

Model build_f_kenmotsu(int n, const KenmotsuFunction& family,
                       std::pair<double, double> t_interval) {
  std::ostringstream name;
  name << "f_kenmotsu(n=" << n << "," << family.describe() << ")";
  return build_warped(n, family, FiberSpec::flat(), t_interval, name.str());
}

Model build_flat(int m) {
  if (m < 3 || m % 2 == 0) throw InvalidParam("flat model dimension must be odd, >= 3");
  if (m > kMaxJetVars) throw InvalidParam("dimension too large");
  Model model;
  model.name = "flat(m=" + std::to_string(m) + ")";
  model.chart = Chart::make(m, {-1.0, 1.0}, {-1.0, 1.0});
  MetricField g = MetricField::zero(m);
  for (int i = 0; i < m; ++i) g.set(i, i, ScalarExpr::constant(1.0));
  model.g = std::move(g);
  return model;
}

Model build_product_h2xr() {
  Model model;
  model.name = "product_h2xr";
  model.chart = Chart::make(3, {-1.0, 1.0}, {-1.0, 1.0});
  MetricField g = MetricField::zero(3);
  g.set(0, 0, ScalarExpr::constant(1.0));
  g.set(1, 1, ScalarExpr::constant(1.0));
  g.set(2, 2, fkgeo::exp(2.0 * ScalarExpr::coordinate(1)));
  model.g = std::move(g);
  return model;
}

// ---------------------------------------------------------------------------
// Verifiers
// ---------------------------------------------------------------------------

namespace {

const ContactStructure& contact_of(const Model& model) {
  if (!model.contact) throw NotApplicable("model carries no contact structure");
  return *model.contact;
}

struct FJet {
  double f;
  Eigen::VectorXd df;     // coordinate gradient of f
  double xi_f;            // xi(f) = df(xi)
};

FJet f_jet_at(const Model& model, const Point& p) {
  const auto& kf = model.fkf;
  if (!kf) throw NotApplicable("model carries no Kenmotsu function");
  const int m = model.m();
  std::vector<int> dirs(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) dirs[static_cast<std::size_t>(i)] = i;
  Jet j = eval_jet(kf->f, p, 1, dirs);
  FJet out;
  out.f = j.value();
  out.df.resize(m);
  for (int a = 0; a < m; ++a) out.df[a] = j.partial({a});
  const Eigen::VectorXd xi = contact_of(model).xi.value(p);
  out.xi_f = out.df.dot(xi);
  return out;
}

void bump(ResidualReport& rep, const std::string& key, double v) {
  auto it = rep.find(key);
  if (it == rep.end() || it->second < v) rep[key] = v;
}

}  // namespace

ResidualReport verify_structure(const Model& model, int samples, std::uint64_t seed) {
  const auto& cs = contact_of(model);
  const int m = model.m();
  Rng rng(seed);
  ResidualReport rep;
  for (int s = 0; s < samples; ++s) {
    const Point p = rng.point_in(model.chart);
    const Eigen::MatrixXd phi = cs.phi.value(p);
    const Eigen::VectorXd xi = cs.xi.value(p);
    const Eigen::VectorXd eta = cs.eta.value(p);
    const Eigen::MatrixXd gv = model.g.value(p);
    Frame fr(gv);

    // (a) phi^2 = -I + eta x xi
    bump(rep, "axiom_a",
         fr.op_max(phi * phi + Eigen::MatrixXd::Identity(m, m) - xi * eta.transpose()));
    // (b) eta(xi) = 1
    bump(rep, "axiom_b", std::abs(eta.dot(xi) - 1.0));
    // (c) eta o phi = 0
    bump(rep, "axiom_c", fr.covec_norm(phi.transpose() * eta));
    // (d) phi(xi) = 0
    bump(rep, "axiom_d", fr.vec_norm(phi * xi));
    // (e) eta(X) = g(X, xi)
    bump(rep, "axiom_e", fr.covec_norm(eta - gv * xi));
    // (f) g(phi X, phi Y) = g(X,Y) - eta(X) eta(Y)
    bump(rep, "axiom_f",
         fr.cov2_max(phi.transpose() * gv * phi - gv + eta * eta.transpose()));
  }
  return rep;
}

ResidualReport verify_kenmotsu_identities(const Model& model, int samples,
                                          std::uint64_t seed) {
  const auto& cs = contact_of(model);
  const int m = model.m();
  const int n2 = model.m() - 1;  // 2n
  Rng rng(seed);
  ResidualReport rep;

  for (int s = 0; s < samples; ++s) {
    const Point p = rng.point_in(model.chart);
    const Eigen::MatrixXd phi = cs.phi.value(p);
    const Eigen::VectorXd xi = cs.xi.value(p);
    const Eigen::VectorXd eta = cs.eta.value(p);
    const FJet fj = f_jet_at(model, p);

    const CurvatureBundle b = riemann(model.g, p);
    Frame fr(b.g);

    const Array3<double> nphi = cov_deriv_t11(model.g, cs.phi, p);
    const Eigen::MatrixXd nxi = cov_deriv_vector(model.g, cs.xi, p);

    const Eigen::VectorXd X = rng.unit_vector(m);
    const Eigen::VectorXd Y = rng.unit_vector(m);

    const double etaX = eta.dot(X), etaY = eta.dot(Y);
    const double Xf = fj.df.dot(X), Yf = fj.df.dot(Y);

    // (1.2): (nabla_X phi)(Y) - f (g(phi X, Y) xi - eta(Y) phi X)
    {
      Eigen::VectorXd lhs = Eigen::VectorXd::Zero(m);
      for (int i = 0; i < m; ++i)
        for (int a = 0; a < m; ++a)
          for (int j = 0; j < m; ++j) lhs[i] += X[a] * nphi(a, i, j) * Y[j];
      const double gphiXY = (phi * X).dot(b.g * Y);
      const Eigen::VectorXd rhs = fj.f * (gphiXY * xi - etaY * (phi * X));
      bump(rep, "eq_1_2", fr.vec_norm(lhs - rhs));
    }

    // (1.3): nabla_X xi - f (X - eta(X) xi)
    {
      Eigen::VectorXd lhs = Eigen::VectorXd::Zero(m);
      for (int i = 0; i < m; ++i)
        for (int a = 0; a < m; ++a) lhs[i] += X[a] * nxi(a, i);
      const Eigen::VectorXd rhs = fj.f * (X - etaX * xi);
      bump(rep, "eq_1_3", fr.vec_norm(lhs - rhs));
    }

    // (1.4): R(X,Y)xi - [f^2 (eta(X) Y - eta(Y) X) + Y(f) phi^2 X - X(f) phi^2 Y]
    {
      Eigen::VectorXd lhs = Eigen::VectorXd::Zero(m);
      for (int l = 0; l < m; ++l)
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
              lhs[l] += b.riem_up(l, i, j, k) * X[i] * Y[j] * xi[k];
      const Eigen::VectorXd rhs = fj.f * fj.f * (etaX * Y - etaY * X) +
                                  Yf * (phi * (phi * X)) - Xf * (phi * (phi * Y));
      bump(rep, "eq_1_4", fr.vec_norm(lhs - rhs));
    }

    // (1.5): S(xi,xi) vs -2n (f^2 + xi(f)), both sides independent.
    {
      const double lhs = xi.dot(b.ricci * xi);
      const double rhs = -n2 * (fj.f * fj.f + fj.xi_f);
      bump(rep, "eq_1_5", std::abs(lhs - rhs));
    }

    // (1.6): Q(xi) + 2n f^2 xi + xi(f) xi + (2n-1) grad f
    {
      const Eigen::VectorXd Qxi = b.ricci_op * xi;
      const Eigen::VectorXd gradf = b.ginv * fj.df;
      const Eigen::VectorXd resid =
          Qxi + n2 * fj.f * fj.f * xi + fj.xi_f * xi + (n2 - 1) * gradf;
      bump(rep, "eq_1_6", fr.vec_norm(resid));
    }
  }
  return rep;
}

double verify_dim3_ricci(const Model& model, int samples, std::uint64_t seed) {
  if (model.n != 1 || model.m() != 3)
    throw DimensionError("the dim-3 Ricci closed form needs n = 1");
  const auto& cs = contact_of(model);
  Rng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Point p = rng.point_in(model.chart);
    const CurvatureBundle b = riemann(model.g, p);
    Frame fr(b.g);
    const Eigen::VectorXd eta = cs.eta.value(p);
    const FJet fj = f_jet_at(model, p);
    const double r = b.scalar;
    const double ca = r / 2.0 + fj.xi_f + fj.f * fj.f;
    const double cb = r / 2.0 + fj.xi_f + 3.0 * fj.f * fj.f;
    const Eigen::MatrixXd rhs = ca * b.g - cb * eta * eta.transpose() -
                                fj.df * eta.transpose() - eta * fj.df.transpose();
    worst = std::max(worst, fr.cov2_max(b.ricci - rhs));
  }
  return worst;
}

EtaEinsteinFit eta_einstein_fit(const Model& model, int samples, std::uint64_t seed) {
  const auto& cs = contact_of(model);
  const int m = model.m();
  Rng rng(seed);
  EtaEinsteinFit fit;
  double a_min = 0, a_max = 0, b_min = 0, b_max = 0, a_sum = 0, b_sum = 0;
  bool first = true;

  const bool kenmotsu_f1 = model.fkf && model.fkf->is_constant_one();
  fit.coeff_identity_applicable = kenmotsu_f1;

  for (int s = 0; s < samples; ++s) {
    const Point p = rng.point_in(model.chart);
    const CurvatureBundle b = riemann(model.g, p);
    Frame fr(b.g);
    const Eigen::VectorXd eta = cs.eta.value(p);

    // Frame components: g -> I, eta x eta -> (L^{-1} eta)(L^{-1} eta)^T.
    const Eigen::MatrixXd Sf = fr.cov2(b.ricci);
    const Eigen::VectorXd ef = fr.covec(eta);
    const Eigen::MatrixXd Ef = ef * ef.transpose();
    const Eigen::MatrixXd If = Eigen::MatrixXd::Identity(m, m);

    // Least squares for S = a g + b eta x eta over the m(m+1)/2 entries.
    double m11 = 0, m12 = 0, m22 = 0, r1 = 0, r2 = 0;
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        m11 += If(i, j) * If(i, j);
        m12 += If(i, j) * Ef(i, j);
        m22 += Ef(i, j) * Ef(i, j);
        r1 += If(i, j) * Sf(i, j);
        r2 += Ef(i, j) * Sf(i, j);
      }
    const double det = m11 * m22 - m12 * m12;
    double a, bb;
    if (std::abs(det) > 1e-12) {
      a = (m22 * r1 - m12 * r2) / det;
      bb = (m11 * r2 - m12 * r1) / det;
    } else {
      a = r1 / m11;
      bb = 0.0;
    }
    fit.residual = std::max(fit.residual, (Sf - a * If - bb * Ef).cwiseAbs().maxCoeff());

    if (first) {
      a_min = a_max = a;
      b_min = b_max = bb;
      first = false;
    } else {
      a_min = std::min(a_min, a);
      a_max = std::max(a_max, a);
      b_min = std::min(b_min, bb);
      b_max = std::max(b_max, bb);
    }
    a_sum += a;
    b_sum += bb;

    if (kenmotsu_f1) {
      const double n2 = m - 1;
      const double a_id = b.scalar / n2 + 1.0;
      const double b_id = -(b.scalar / n2 + n2 + 1.0);
      fit.coeff_identity_residual = std::max(
          fit.coeff_identity_residual,
          std::max(std::abs(a - a_id), std::abs(bb - b_id)));
    }
  }
  fit.a_mean = a_sum / samples;
  fit.b_mean = b_sum / samples;
  fit.a_spread = a_max - a_min;
  fit.b_spread = b_max - b_min;
  return fit;
}

}  // namespace fkgeo
