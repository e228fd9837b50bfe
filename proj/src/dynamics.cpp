#include "fkgeo/dynamics.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "fkgeo/curvature.hpp"

namespace fkgeo {

namespace {

Eigen::VectorXd geodesic_acc(const Array3<double>& G, const Eigen::VectorXd& v) {
  const int m = static_cast<int>(v.size());
  Eigen::VectorXd acc(m);
  for (int k = 0; k < m; ++k) {
    double s = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) s += G(k, i, j) * v[i] * v[j];
    acc[k] = -s;
  }
  return acc;
}

}  // namespace

GeodesicTrace integrate_geodesic(const Model& model, const Point& x0,
                                 const Eigen::VectorXd& v0, double T, double h,
                                 const GeodesicOptions& opts) {
  const int m = model.m();
  if (!(h > 0.0)) throw InvalidParam("step must be positive");
  if (v0.norm() == 0.0) throw InvalidParam("initial velocity must be nonzero");

  Eigen::VectorXd x(m);
  for (int i = 0; i < m; ++i) x[i] = x0[static_cast<std::size_t>(i)];

  const Eigen::MatrixXd g0 = model.g.value(x0);
  Eigen::VectorXd v = v0;
  if (opts.normalize_velocity) v /= std::sqrt(v0.dot(g0 * v0));

  GeodesicTrace tr;
  const int steps = static_cast<int>(std::round(T / h));
  tr.times.reserve(static_cast<std::size_t>(steps) + 1);
  tr.xs.reserve(static_cast<std::size_t>(steps) + 1);
  tr.vs.reserve(static_cast<std::size_t>(steps) + 1);
  tr.energy.reserve(static_cast<std::size_t>(steps) + 1);

  Point px(static_cast<std::size_t>(m));
  auto to_point = [&](const Eigen::VectorXd& y) {
    for (int i = 0; i < m; ++i) px[static_cast<std::size_t>(i)] = y[i];
    return px;
  };

  auto record = [&](double t) {
    tr.times.push_back(t);
    tr.xs.push_back(x);
    tr.vs.push_back(v);
    tr.energy.push_back(v.dot(model.g.value(to_point(x)) * v));
  };
  record(0.0);

  for (int s = 0; s < steps; ++s) {
    // RK4 on (x, v).
    const Array3<double> G1 = christoffel(model.g, to_point(x));
    const Eigen::VectorXd k1x = v, k1v = geodesic_acc(G1, v);

    const Array3<double> G2 = christoffel(model.g, to_point(x + 0.5 * h * k1x));
    const Eigen::VectorXd k2x = v + 0.5 * h * k1v,
                          k2v = geodesic_acc(G2, v + 0.5 * h * k1v);

    const Array3<double> G3 = christoffel(model.g, to_point(x + 0.5 * h * k2x));
    const Eigen::VectorXd k3x = v + 0.5 * h * k2v,
                          k3v = geodesic_acc(G3, v + 0.5 * h * k2v);

    const Array3<double> G4 = christoffel(model.g, to_point(x + h * k3x));
    const Eigen::VectorXd k4x = v + h * k3v, k4v = geodesic_acc(G4, v + h * k3v);

    const Eigen::VectorXd xn = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    const Eigen::VectorXd vn = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

    if (!model.chart.in_hard_box(to_point(xn))) {
      tr.domain_exit = true;
      break;
    }
    x = xn;
    v = vn;
    record((s + 1) * h);
  }

  const double e0 = tr.energy.front();
  double drift = 0.0;
  for (double e : tr.energy) drift = std::max(drift, std::abs(e - e0));
  tr.energy_drift = drift / std::max(std::abs(e0), 1e-300);
  if (opts.throw_on_coarse && tr.energy_drift > opts.drift_tol)
    throw StepTooCoarse("kinetic-energy drift " + std::to_string(tr.energy_drift) +
                        " exceeds tolerance");
  return tr;
}

std::vector<double> qfi_series(const GeodesicTrace& trace, const SymTensor2Field& a) {
  const int m = a.m;
  Point p(static_cast<std::size_t>(m));
  std::vector<double> f;
  f.reserve(trace.xs.size());
  for (std::size_t s = 0; s < trace.xs.size(); ++s) {
    for (int i = 0; i < m; ++i) p[static_cast<std::size_t>(i)] = trace.xs[s][i];
    f.push_back(trace.vs[s].dot(a.value(p) * trace.vs[s]));
  }
  return f;
}

double qfi_drift(const GeodesicTrace& trace, const SymTensor2Field& a) {
  const std::vector<double> f = qfi_series(trace, a);
  double worst = 0.0;
  for (double v : f) worst = std::max(worst, std::abs(v - f.front()));
  return worst / std::max(std::abs(f.front()), 1e-12);
}

KillingTypeReport killing_type_residual(const Model& model, const SymTensor2Field& a,
                                        int samples, std::uint64_t seed) {
  const int m = model.m();
  Rng rng(seed);
  KillingTypeReport rep;
  for (int s = 0; s < samples; ++s) {
    const Point p = rng.point_in(model.chart);
    const Array3<double> na = cov_deriv_sym2(model.g, a, p);  // (k, i, j)
    Frame fr(model.g.value(p));
    const Array3<double> naf = fr.cov3(na);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          rep.sqfi_residual = std::max(rep.sqfi_residual, std::abs(naf(k, i, j)));
          rep.killing_residual =
              std::max(rep.killing_residual,
                       std::abs(naf(k, i, j) + naf(i, j, k) + naf(j, k, i)));
        }
  }
  return rep;
}

ConformalFitReport conformal_fit(const Model& model, const VectorFieldExpr& X,
                                 int samples, std::uint64_t seed) {
  const int m = model.m();
  Rng rng(seed);
  ConformalFitReport rep;
  double tr_sum = 0.0;
  std::vector<Eigen::MatrixXd> lies_f;
  lies_f.reserve(static_cast<std::size_t>(samples));

  for (int s = 0; s < samples; ++s) {
    const Point p = rng.point_in(model.chart);
    MetricJets mj(model.g, p, 1);
    const std::vector<Jet> lj = lie_metric_jets(model.g, X, p, 1);
    Frame fr(mj.g_value());

    Eigen::MatrixXd L(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) L(i, j) = lj[static_cast<std::size_t>(i * m + j)].value();
    const Eigen::MatrixXd Lf = fr.cov2(L);
    lies_f.push_back(Lf);
    tr_sum += Lf.trace();

    const Array3<double> nL = cov_deriv_sym2_jets(mj, lj);
    rep.affine_residual = std::max(rep.affine_residual, fr.cov3_max(nL));
  }

  // argmin_c sum ||L_f - c I||_F^2  ->  c = sum tr(L_f) / (m count).
  rep.c = tr_sum / (m * samples);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m, m);
  for (const auto& Lf : lies_f)
    rep.residual = std::max(rep.residual, (Lf - rep.c * id).cwiseAbs().maxCoeff());
  return rep;
}

VectorFieldExpr fiber_rotation_field(int m) {
  VectorFieldExpr v = VectorFieldExpr::zero(m);
  v.comp[1] = -ScalarExpr::coordinate(2);
  v.comp[2] = ScalarExpr::coordinate(1);
  return v;
}

}  // namespace fkgeo
