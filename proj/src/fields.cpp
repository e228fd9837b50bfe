#include "fkgeo/fields.hpp"

namespace fkgeo {

Eigen::MatrixXd MetricField::value(const Point& p) const {
  Eigen::MatrixXd out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out(i, j) = eval_value(at(i, j), p);
  return out;
}

VectorFieldExpr VectorFieldExpr::zero(int m) {
  VectorFieldExpr v;
  v.comp.assign(static_cast<std::size_t>(m), ScalarExpr::constant(0.0));
  return v;
}

Eigen::VectorXd VectorFieldExpr::value(const Point& p) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(comp.size()));
  for (std::size_t i = 0; i < comp.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = eval_value(comp[i], p);
  return out;
}

OneFormExpr OneFormExpr::zero(int m) {
  OneFormExpr w;
  w.comp.assign(static_cast<std::size_t>(m), ScalarExpr::constant(0.0));
  return w;
}

Eigen::VectorXd OneFormExpr::value(const Point& p) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(comp.size()));
  for (std::size_t i = 0; i < comp.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = eval_value(comp[i], p);
  return out;
}

Tensor11Expr Tensor11Expr::zero(int m) {
  Tensor11Expr t;
  t.m = m;
  t.comp.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m),
                ScalarExpr::constant(0.0));
  return t;
}

Eigen::MatrixXd Tensor11Expr::value(const Point& p) const {
  Eigen::MatrixXd out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out(i, j) = eval_value(at(i, j), p);
  return out;
}

SymTensor2Field SymTensor2Field::zero(int m) {
  SymTensor2Field a;
  a.m = m;
  a.comp.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(m),
                ScalarExpr::constant(0.0));
  return a;
}

Eigen::MatrixXd SymTensor2Field::value(const Point& p) const {
  Eigen::MatrixXd out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out(i, j) = eval_value(at(i, j), p);
  return out;
}

}  // namespace fkgeo
