#pragma once

#include <vector>

#include <Eigen/Core>

#include "fkgeo/chart.hpp"
#include "fkgeo/expr.hpp"
#include "fkgeo/fields.hpp"
#include "fkgeo/multiarray.hpp"

namespace fkgeo {

// Orthonormal-frame transforms at a point, g = L L^T. Residuals measured in
// frame components are invariant under coordinate scaling, which keeps a
// single tolerance meaningful across warped metrics with e^{2W} factors.
class Frame {
 public:
  explicit Frame(const Eigen::MatrixXd& g);

  const Eigen::MatrixXd& L() const { return L_; }

  Eigen::VectorXd vec(const Eigen::VectorXd& v) const { return L_.transpose() * v; }
  Eigen::VectorXd covec(const Eigen::VectorXd& w) const { return Linv_ * w; }
  Eigen::MatrixXd cov2(const Eigen::MatrixXd& A) const {
    return Linv_ * A * Linv_.transpose();
  }
  Eigen::MatrixXd op(const Eigen::MatrixXd& T) const {
    return L_.transpose() * T * Linv_.transpose();
  }
  Array3<double> cov3(const Array3<double>& T) const;
  Array4<double> cov4(const Array4<double>& T) const;

  double vec_norm(const Eigen::VectorXd& v) const { return vec(v).norm(); }
  double covec_norm(const Eigen::VectorXd& w) const { return covec(w).norm(); }
  double cov2_max(const Eigen::MatrixXd& A) const {
    return cov2(A).cwiseAbs().maxCoeff();
  }
  double op_max(const Eigen::MatrixXd& T) const {
    return op(T).cwiseAbs().maxCoeff();
  }
  double cov3_max(const Array3<double>& T) const;
  double cov4_max(const Array4<double>& T) const;

 private:
  Eigen::MatrixXd L_, Linv_;
};

// Pointwise curvature data. Index conventions:
//   gamma(k,i,j)      = Gamma^k_ij
//   riem_up(l,i,j,k)  : R(e_i,e_j)e_k = riem_up(l,i,j,k) e_l
//   riem_low(i,j,k,l) = g(R(e_i,e_j)e_k, e_l)
//   ricci(i,j)        = S_ij = trace(Z -> R(Z, e_i) e_j)
//   nabla_r(a,l,i,j,k), nabla_s(a,i,j) : covariant derivatives (full depth)
struct CurvatureBundle {
  int m = 0;
  Eigen::MatrixXd g, ginv;
  Array3<double> gamma;
  Array4<double> riem_up;
  Array4<double> riem_low;
  Eigen::MatrixXd ricci;
  Eigen::MatrixXd ricci_op;  // Q^i_j
  double scalar = 0.0;
  bool full = false;
  Eigen::VectorXd dscalar;  // coordinate gradient of r
  Array5<double> nabla_r;
  Array3<double> nabla_s;
};

// Jet-level evaluation of a metric at a point. order 1 gives the
// connection, order 2 curvature values, order 3 additionally first
// derivatives of R, S and r (everything any formula in scope needs).
class MetricJets {
 public:
  MetricJets(const MetricField& g, const Point& p, int order);

  int m() const { return m_; }
  int order() const { return order_; }
  const Point& point() const { return p_; }

  const Jet& g_jet(int i, int j) const { return gj_[idx2(i, j)]; }
  const Jet& ginv_jet(int i, int j) const { return ginvj_[idx2(i, j)]; }
  const Jet& gamma_jet(int k, int i, int j) const {
    return gammaj_[(static_cast<std::size_t>(k) * mu_ + static_cast<std::size_t>(i)) * mu_ +
                   static_cast<std::size_t>(j)];
  }
  const Jet& riem_jet(int l, int i, int j, int k) const {
    return riemj_[((static_cast<std::size_t>(l) * mu_ + static_cast<std::size_t>(i)) * mu_ +
                   static_cast<std::size_t>(j)) * mu_ + static_cast<std::size_t>(k)];
  }
  const Jet& ricci_jet(int i, int j) const { return riccij_[idx2(i, j)]; }
  const Jet& scalar_jet() const { return scalarj_; }

  Eigen::MatrixXd g_value() const;
  Eigen::MatrixXd ginv_value() const;
  Array3<double> gamma_value() const;

  CurvatureBundle bundle() const;

 private:
  std::size_t idx2(int i, int j) const {
    return static_cast<std::size_t>(i) * mu_ + static_cast<std::size_t>(j);
  }

  int m_, order_;
  std::size_t mu_;
  Point p_;
  std::vector<Jet> gj_, ginvj_, gammaj_, riemj_, riccij_;
  Jet scalarj_;
};

// Levi-Civita connection coefficients at p.
Array3<double> christoffel(const MetricField& g, const Point& p);

// Curvature tensor at p, both valences plus Ricci data.
CurvatureBundle riemann(const MetricField& g, const Point& p);

// Full bundle with nabla_R / nabla_S / dr.
CurvatureBundle curvature_bundle(const MetricField& g, const Point& p);

struct RicciData {
  Eigen::MatrixXd S;
  Eigen::MatrixXd Q;
  double r;
};
RicciData ricci(const MetricField& g, const Point& p);

// Covariant derivatives of expression tensor fields; derivative index first.
Eigen::MatrixXd cov_deriv_oneform(const MetricField& g, const OneFormExpr& w, const Point& p);
Eigen::MatrixXd cov_deriv_vector(const MetricField& g, const VectorFieldExpr& v, const Point& p);
Array3<double> cov_deriv_t11(const MetricField& g, const Tensor11Expr& T, const Point& p);
Array3<double> cov_deriv_sym2(const MetricField& g, const SymTensor2Field& a, const Point& p);

// (L_V g)(e_i, e_j) at p.
Eigen::MatrixXd lie_metric(const MetricField& g, const VectorFieldExpr& V, const Point& p);

// Jets of (L_V g)_ij to the requested order (order+1 metric/vector jets are
// used internally, so order <= 2).
std::vector<Jet> lie_metric_jets(const MetricField& g, const VectorFieldExpr& V,
                                 const Point& p, int order);

// nabla_a A_ij for a (0,2) tensor given as jets of order >= 1 at p.
Array3<double> cov_deriv_sym2_jets(const MetricJets& mj, const std::vector<Jet>& a);

double sectional_curvature(const CurvatureBundle& b, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& v);

// Symmetry / Bianchi / trace diagnostics of a curvature bundle (frame
// components; div Q - grad r / 2 requires full depth).
struct CurvatureChecks {
  double gamma_sym = 0.0;
  double antisym_12 = 0.0;
  double antisym_34 = 0.0;
  double pair_sym = 0.0;
  double bianchi1 = 0.0;
  double ricci_sym = 0.0;
  double trace_identity = 0.0;
  double contracted_bianchi2 = 0.0;
};
CurvatureChecks curvature_checks(const MetricField& g, const Point& p);

}  // namespace fkgeo
