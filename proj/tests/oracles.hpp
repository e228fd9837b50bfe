#pragma once

// Test-side oracles, independent of the library's evaluation paths:
//  - hand-built metric fields,
//  - finite-difference Christoffel symbols from the defining formula,
//  - the constant-curvature closed form R(X,Y)Z = c (g(Y,Z)X - g(X,Z)Y),
//  - warped-product scalar curvature r(t) = 2 k e^{-2W} - 4 W'' - 6 W'^2 (dim 3),
//  - brute-force matrix rank by Gaussian elimination.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "fkgeo/curvature.hpp"
#include "fkgeo/expr.hpp"
#include "fkgeo/fields.hpp"
#include "fkgeo/multiarray.hpp"

namespace oracles {

using fkgeo::Array3;
using fkgeo::Array4;
using fkgeo::ExprPtr;
using fkgeo::MetricField;
using fkgeo::Point;
using fkgeo::ScalarExpr;

inline ExprPtr coord(int i) { return ScalarExpr::coordinate(i); }

// g = dt^2 + e^{2 beta t}(dx^2 + dy^2); hyperbolic space of curvature -beta^2.
inline MetricField hyperbolic3(double beta = 1.0) {
  MetricField g = MetricField::zero(3);
  g.set(0, 0, ScalarExpr::constant(1.0));
  auto warp = fkgeo::exp(2.0 * beta * coord(0));
  g.set(1, 1, warp);
  g.set(2, 2, warp);
  return g;
}

inline MetricField euclidean(int m, double scale = 1.0) {
  MetricField g = MetricField::zero(m);
  for (int i = 0; i < m; ++i) g.set(i, i, ScalarExpr::constant(scale));
  return g;
}

// g = dt^2 + dx^2 + e^{2x} dy^2; R x H^2 product, coordinates (t, x, y).
inline MetricField product_h2xr() {
  MetricField g = MetricField::zero(3);
  g.set(0, 0, ScalarExpr::constant(1.0));
  g.set(1, 1, ScalarExpr::constant(1.0));
  g.set(2, 2, fkgeo::exp(2.0 * coord(1)));
  return g;
}

// Central-difference Christoffel symbols straight from
// Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij).
inline Array3<double> fd_christoffel(const MetricField& g, const Point& p, double h = 1e-6) {
  const int m = g.m;
  Array3<double> dg({m, m, m});
  Point q = p;
  for (int a = 0; a < m; ++a) {
    q[static_cast<std::size_t>(a)] = p[static_cast<std::size_t>(a)] + h;
    Eigen::MatrixXd gp = g.value(q);
    q[static_cast<std::size_t>(a)] = p[static_cast<std::size_t>(a)] - h;
    Eigen::MatrixXd gm = g.value(q);
    q[static_cast<std::size_t>(a)] = p[static_cast<std::size_t>(a)];
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) dg(a, i, j) = (gp(i, j) - gm(i, j)) / (2.0 * h);
  }
  Eigen::MatrixXd ginv = g.value(p).inverse();
  Array3<double> G({m, m, m});
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int l = 0; l < m; ++l)
          s += ginv(k, l) * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
        G(k, i, j) = 0.5 * s;
      }
  return G;
}

// Max componentwise deviation of lowered curvature from the constant-curvature
// closed form R_{ijkl} = c (g_jk g_il - g_ik g_jl).
inline double constant_curvature_residual(const fkgeo::CurvatureBundle& b, double c) {
  double worst = 0.0;
  const int m = b.m;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          const double expect = c * (b.g(j, k) * b.g(i, l) - b.g(i, k) * b.g(j, l));
          worst = std::max(worst, std::abs(b.riem_low(i, j, k, l) - expect));
        }
  return worst;
}

// Scalar curvature of dt^2 + e^{2W}g_N over a surface fiber of curvature k:
// r = 2 k e^{-2W} - 4 W'' - 6 W'^2.
inline double warped3_scalar(double k, double W, double Wp, double Wpp) {
  return 2.0 * k * std::exp(-2.0 * W) - 4.0 * Wpp - 6.0 * Wp * Wp;
}

// Brute-force rank by Gaussian elimination with full pivoting.
inline int brute_rank(Eigen::MatrixXd A, double tol) {
  int rank = 0;
  const int rows = static_cast<int>(A.rows()), cols = static_cast<int>(A.cols());
  std::vector<bool> used(static_cast<std::size_t>(rows), false);
  for (int c = 0; c < cols; ++c) {
    int piv = -1;
    double best = tol;
    for (int r = 0; r < rows; ++r) {
      if (!used[static_cast<std::size_t>(r)] && std::abs(A(r, c)) > best) {
        best = std::abs(A(r, c));
        piv = r;
      }
    }
    if (piv < 0) continue;
    used[static_cast<std::size_t>(piv)] = true;
    ++rank;
    for (int r = 0; r < rows; ++r) {
      if (r == piv) continue;
      const double f = A(r, c) / A(piv, c);
      if (f != 0.0) A.row(r) -= f * A.row(piv);
    }
  }
  return rank;
}

}  // namespace oracles
