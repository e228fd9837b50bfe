#include "fkgeo/transport.hpp"

#include <cmath>

#include "fkgeo/curvature.hpp"

namespace fkgeo {

Polyline Polyline::rectangle(const Point& base, int axis_i, int axis_j,
                             double side_i, double side_j) {
  Point a = base;
  Point b = base;
  b[static_cast<std::size_t>(axis_i)] += side_i;
  Point c = b;
  c[static_cast<std::size_t>(axis_j)] += side_j;
  Point d = base;
  d[static_cast<std::size_t>(axis_j)] += side_j;
  return {{a, b, c, d, a}};
}

double Polyline::coordinate_length() const {
  double len = 0.0;
  for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
    double seg = 0.0;
    for (std::size_t i = 0; i < pts[s].size(); ++i) {
      const double d = pts[s + 1][i] - pts[s][i];
      seg += d * d;
    }
    len += std::sqrt(seg);
  }
  return len;
}

namespace {

// Transport derivative along velocity w for both payload kinds.
//   Frame (columns are vectors): V' = -A V          with A^i_m = Gamma^i_km w^k
//   Cov2 (a_ij):                 a' = A^T a + a A
Eigen::MatrixXd transport_rhs(const Array3<double>& gamma, const Eigen::VectorXd& w,
                              const Eigen::MatrixXd& val, TransportKind kind) {
  const int m = static_cast<int>(w.size());
  Eigen::MatrixXd A(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += gamma(i, k, j) * w[k];
      A(i, j) = s;
    }
  if (kind == TransportKind::Frame) return -A * val;
  return A.transpose() * val + val * A;
}

}  // namespace

Eigen::MatrixXd parallel_transport(const MetricField& g, const Polyline& path,
                                   const Eigen::MatrixXd& value0, TransportKind kind,
                                   const TransportOptions& opts) {
  if (path.pts.size() < 2) return value0;
  const int m = g.m;

  Eigen::MatrixXd val = value0;
  Eigen::MatrixXd met = g.value(path.pts.front());

  for (std::size_t s = 0; s + 1 < path.pts.size(); ++s) {
    const Point& a = path.pts[s];
    const Point& b = path.pts[s + 1];
    Eigen::VectorXd w(m);
    double seg_len = 0.0;
    for (int i = 0; i < m; ++i) {
      w[i] = b[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(i)];
      seg_len += w[i] * w[i];
    }
    seg_len = std::sqrt(seg_len);
    if (seg_len == 0.0) continue;

    const int steps = std::max(opts.min_steps,
                               static_cast<int>(std::ceil(opts.steps_per_unit_length * seg_len)));
    const double h = 1.0 / steps;

    Point x(static_cast<std::size_t>(m));
    auto gamma_at = [&](double s01) {
      for (int i = 0; i < m; ++i)
        x[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] + s01 * w[i];
      return christoffel(g, x);
    };

    // The end evaluation of each step is the start of the next one.
    Array3<double> g_lo = gamma_at(0.0);
    for (int step = 0; step < steps; ++step) {
      const double s0 = step * h;
      const Array3<double> g_mid = gamma_at(s0 + 0.5 * h);
      const Array3<double> g_hi = gamma_at(s0 + h);

      auto rk4 = [&](Eigen::MatrixXd& y, TransportKind k) {
        const Eigen::MatrixXd k1 = transport_rhs(g_lo, w, y, k);
        const Eigen::MatrixXd k2 = transport_rhs(g_mid, w, y + 0.5 * h * k1, k);
        const Eigen::MatrixXd k3 = transport_rhs(g_mid, w, y + 0.5 * h * k2, k);
        const Eigen::MatrixXd k4 = transport_rhs(g_hi, w, y + h * k3, k);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      };
      rk4(val, kind);
      rk4(met, TransportKind::Cov2);
      g_lo = g_hi;
    }
  }

  // Self check: the co-transported metric must land on g(endpoint).
  const Eigen::MatrixXd g_end = g.value(path.pts.back());
  Frame fr(g_end);
  const double dev = fr.cov2_max(met - g_end);
  if (dev > opts.self_check_tol)
    throw StepTooCoarse("transport self-check failed: metric deviation " +
                        std::to_string(dev));
  return val;
}

}  // namespace fkgeo
