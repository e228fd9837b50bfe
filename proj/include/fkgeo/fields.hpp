#pragma once

#include <vector>

#include <Eigen/Core>

#include "fkgeo/chart.hpp"
#include "fkgeo/expr.hpp"

namespace fkgeo {

// Symmetric metric tensor as an m x m array of expressions. Components are
// stored row-major; construction mirrors (i,j) onto (j,i) so g_ij and g_ji
// are the same tree.
struct MetricField {
  int m = 0;
  std::vector<ExprPtr> comp;

  static MetricField zero(int m) {
    MetricField g;
    g.m = m;
    g.comp.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m),
                  ScalarExpr::constant(0.0));
    return g;
  }

  const ExprPtr& at(int i, int j) const {
    return comp[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) +
                static_cast<std::size_t>(j)];
  }
  void set(int i, int j, ExprPtr e) {
    comp[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) +
         static_cast<std::size_t>(j)] = e;
    comp[static_cast<std::size_t>(j) * static_cast<std::size_t>(m) +
         static_cast<std::size_t>(i)] = std::move(e);
  }

  Eigen::MatrixXd value(const Point& p) const;
};

struct VectorFieldExpr {
  std::vector<ExprPtr> comp;  // V^i

  static VectorFieldExpr zero(int m);
  Eigen::VectorXd value(const Point& p) const;
};

struct OneFormExpr {
  std::vector<ExprPtr> comp;  // w_i

  static OneFormExpr zero(int m);
  Eigen::VectorXd value(const Point& p) const;
};

// (1,1)-tensor T^i_j, row index upper.
struct Tensor11Expr {
  int m = 0;
  std::vector<ExprPtr> comp;

  static Tensor11Expr zero(int m);
  const ExprPtr& at(int i, int j) const {
    return comp[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) +
                static_cast<std::size_t>(j)];
  }
  void set(int i, int j, ExprPtr e) {
    comp[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) +
         static_cast<std::size_t>(j)] = std::move(e);
  }
  Eigen::MatrixXd value(const Point& p) const;
};

// Symmetric (0,2)-tensor field a_ij.
struct SymTensor2Field {
  int m = 0;
  std::vector<ExprPtr> comp;

  static SymTensor2Field zero(int m);
  const ExprPtr& at(int i, int j) const {
    return comp[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) +
                static_cast<std::size_t>(j)];
  }
  void set(int i, int j, ExprPtr e) {
    comp[static_cast<std::size_t>(i) * static_cast<std::size_t>(m) +
         static_cast<std::size_t>(j)] = e;
    comp[static_cast<std::size_t>(j) * static_cast<std::size_t>(m) +
         static_cast<std::size_t>(i)] = std::move(e);
  }
  Eigen::MatrixXd value(const Point& p) const;

  static SymTensor2Field from_metric(const MetricField& g) {
    SymTensor2Field a;
    a.m = g.m;
    a.comp = g.comp;
    return a;
  }
};

}  // namespace fkgeo
