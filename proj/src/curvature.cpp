#include "fkgeo/curvature.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace fkgeo {

// ---------------------------------------------------------------------------
// Frame
// ---------------------------------------------------------------------------

Frame::Frame(const Eigen::MatrixXd& g) {
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success)
    throw SingularMetric("metric not positive definite at point");
  L_ = llt.matrixL();
  Linv_ = L_.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd::Identity(g.rows(), g.cols()));
}

Array3<double> Frame::cov3(const Array3<double>& T) const {
  const int m = static_cast<int>(L_.rows());
  // Contract each lower index with E = L^{-T}: T_f(a,b,c) = T(i,j,k) E(i,a) E(j,b) E(k,c).
  const Eigen::MatrixXd E = Linv_.transpose();
  Array3<double> t1({m, m, m}), t2({m, m, m}), out({m, m, m});
  for (int a = 0; a < m; ++a)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += T(i, j, k) * E(i, a);
        t1(a, j, k) = s;
      }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int k = 0; k < m; ++k) {
        double s = 0.0;
        for (int j = 0; j < m; ++j) s += t1(a, j, k) * E(j, b);
        t2(a, b, k) = s;
      }
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += t2(a, b, k) * E(k, c);
        out(a, b, c) = s;
      }
  return out;
}

Array4<double> Frame::cov4(const Array4<double>& T) const {
  const int m = static_cast<int>(L_.rows());
  const Eigen::MatrixXd E = Linv_.transpose();
  Array4<double> cur = T;
  for (int axis = 0; axis < 4; ++axis) {
    Array4<double> next({m, m, m, m});
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c)
          for (int d = 0; d < m; ++d) {
            double s = 0.0;
            switch (axis) {
              case 0:
                for (int i = 0; i < m; ++i) s += cur(i, b, c, d) * E(i, a);
                break;
              case 1:
                for (int i = 0; i < m; ++i) s += cur(a, i, c, d) * E(i, b);
                break;
              case 2:
                for (int i = 0; i < m; ++i) s += cur(a, b, i, d) * E(i, c);
                break;
              default:
                for (int i = 0; i < m; ++i) s += cur(a, b, c, i) * E(i, d);
                break;
            }
            next(a, b, c, d) = s;
          }
    cur = std::move(next);
  }
  return cur;
}

double Frame::cov3_max(const Array3<double>& T) const {
  double w = 0.0;
  for (double x : cov3(T)) w = std::max(w, std::abs(x));
  return w;
}

double Frame::cov4_max(const Array4<double>& T) const {
  double w = 0.0;
  for (double x : cov4(T)) w = std::max(w, std::abs(x));
  return w;
}

// ---------------------------------------------------------------------------
// Jet linear algebra
// ---------------------------------------------------------------------------

namespace {

// Gauss-Jordan inverse of an m x m jet matrix; pivoting on value parts.
std::vector<Jet> jet_matrix_inverse(std::vector<Jet> a, int m) {
  const JetSpace& sp = a[0].space();
  std::vector<Jet> inv(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      inv[static_cast<std::size_t>(i * m + j)] =
          Jet::constant(sp, i == j ? 1.0 : 0.0);

  auto A = [&](int i, int j) -> Jet& { return a[static_cast<std::size_t>(i * m + j)]; };
  auto B = [&](int i, int j) -> Jet& { return inv[static_cast<std::size_t>(i * m + j)]; };

  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int r = col + 1; r < m; ++r)
      if (std::abs(A(r, col).value()) > std::abs(A(piv, col).value())) piv = r;
    if (std::abs(A(piv, col).value()) < 1e-300)
      throw SingularMetric("singular matrix in jet inverse");
    if (piv != col) {
      for (int j = 0; j < m; ++j) {
        std::swap(A(piv, j), A(col, j));
        std::swap(B(piv, j), B(col, j));
      }
    }
    const Jet pr = recip(A(col, col));
    for (int j = 0; j < m; ++j) {
      A(col, j) = A(col, j) * pr;
      B(col, j) = B(col, j) * pr;
    }
    for (int r = 0; r < m; ++r) {
      if (r == col) continue;
      const Jet f = A(r, col);
      if (f.value() == 0.0) {
        bool zero = true;
        for (int k = 0; k < f.space().size(); ++k)
          if (f.coeff(k) != 0.0) { zero = false; break; }
        if (zero) continue;
      }
      for (int j = 0; j < m; ++j) {
        A(r, j) -= f * A(col, j);
        B(r, j) -= f * B(col, j);
      }
    }
  }
  return inv;
}

}  // namespace

// ---------------------------------------------------------------------------
// MetricJets
// ---------------------------------------------------------------------------

MetricJets::MetricJets(const MetricField& g, const Point& p, int order)
    : m_(g.m), order_(order), mu_(static_cast<std::size_t>(g.m)), p_(p) {
  if (order < 1 || order > 3) throw InvalidParam("metric jet order must be 1..3");
  const int m = m_;
  std::vector<int> dirs(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) dirs[static_cast<std::size_t>(i)] = i;

  gj_.resize(mu_ * mu_);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      gj_[idx2(i, j)] = eval_jet(g.at(i, j), p, order, dirs);
      if (j != i) gj_[idx2(j, i)] = gj_[idx2(i, j)];
    }

  // Positive definiteness gate before any linear algebra.
  {
    Eigen::MatrixXd gv(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) gv(i, j) = gj_[idx2(i, j)].value();
    Eigen::LLT<Eigen::MatrixXd> llt(gv);
    if (llt.info() != Eigen::Success)
      throw SingularMetric("metric not positive definite at evaluation point");
  }

  ginvj_ = jet_matrix_inverse(gj_, m);

  // Gamma^k_ij = 1/2 ginv^{kl} (d_i g_jl + d_j g_il - d_l g_ij); order-1 jets less.
  const int gord = order - 1;
  gammaj_.resize(mu_ * mu_ * mu_);
  {
    // Pre-extract metric derivative jets d_a g_ij at order gord.
    std::vector<Jet> dg(mu_ * mu_ * mu_);
    for (int a = 0; a < m; ++a)
      for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
          Jet d = gj_[idx2(i, j)].deriv(a);
          dg[(static_cast<std::size_t>(a) * mu_ + static_cast<std::size_t>(i)) * mu_ +
             static_cast<std::size_t>(j)] = d;
          dg[(static_cast<std::size_t>(a) * mu_ + static_cast<std::size_t>(j)) * mu_ +
             static_cast<std::size_t>(i)] = std::move(d);
        }
    auto DG = [&](int a, int i, int j) -> const Jet& {
      return dg[(static_cast<std::size_t>(a) * mu_ + static_cast<std::size_t>(i)) * mu_ +
                static_cast<std::size_t>(j)];
    };
    const JetSpace& gsp = JetSpace::get(m, gord);
    for (int k = 0; k < m; ++k)
      for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
          Jet acc(gsp);
          for (int l = 0; l < m; ++l) {
            Jet s = DG(i, j, l) + DG(j, i, l) - DG(l, i, j);
            acc += ginvj_[idx2(k, l)].truncated(gord) * s;
          }
          acc *= 0.5;
          gammaj_[(static_cast<std::size_t>(k) * mu_ + static_cast<std::size_t>(i)) * mu_ +
                  static_cast<std::size_t>(j)] = acc;
          gammaj_[(static_cast<std::size_t>(k) * mu_ + static_cast<std::size_t>(j)) * mu_ +
                  static_cast<std::size_t>(i)] = std::move(acc);
        }
  }

  if (order < 2) return;

  // R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk
  //           - Gamma^l_jm Gamma^m_ik ; order-2 jets less.
  const int rord = order - 2;
  const JetSpace& rsp = JetSpace::get(m, rord);
  riemj_.resize(mu_ * mu_ * mu_ * mu_);
  for (int l = 0; l < m; ++l)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (j == i) {
          for (int k = 0; k < m; ++k)
            riemj_[((static_cast<std::size_t>(l) * mu_ + static_cast<std::size_t>(i)) * mu_ +
                    static_cast<std::size_t>(j)) * mu_ + static_cast<std::size_t>(k)] = Jet(rsp);
          continue;
        }
        if (j < i) {
          for (int k = 0; k < m; ++k) {
            Jet v = riemj_[((static_cast<std::size_t>(l) * mu_ + static_cast<std::size_t>(j)) * mu_ +
                            static_cast<std::size_t>(i)) * mu_ + static_cast<std::size_t>(k)];
            riemj_[((static_cast<std::size_t>(l) * mu_ + static_cast<std::size_t>(i)) * mu_ +
                    static_cast<std::size_t>(j)) * mu_ + static_cast<std::size_t>(k)] = -v;
          }
          continue;
        }
        for (int k = 0; k < m; ++k) {
          Jet acc = gamma_jet(l, j, k).deriv(i) - gamma_jet(l, i, k).deriv(j);
          for (int mm = 0; mm < m; ++mm) {
            acc += gamma_jet(l, i, mm).truncated(rord) * gamma_jet(mm, j, k).truncated(rord);
            acc -= gamma_jet(l, j, mm).truncated(rord) * gamma_jet(mm, i, k).truncated(rord);
          }
          riemj_[((static_cast<std::size_t>(l) * mu_ + static_cast<std::size_t>(i)) * mu_ +
                  static_cast<std::size_t>(j)) * mu_ + static_cast<std::size_t>(k)] = std::move(acc);
        }
      }

  // S_ij = R^k_kij ; r = ginv^{ij} S_ij.
  riccij_.resize(mu_ * mu_);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Jet acc(rsp);
      for (int k = 0; k < m; ++k) acc += riem_jet(k, k, i, j);
      riccij_[idx2(i, j)] = std::move(acc);
    }
  scalarj_ = Jet(rsp);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      scalarj_ += ginvj_[idx2(i, j)].truncated(rord) * riccij_[idx2(i, j)];
}

Eigen::MatrixXd MetricJets::g_value() const {
  Eigen::MatrixXd g(m_, m_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) g(i, j) = gj_[idx2(i, j)].value();
  return g;
}

Eigen::MatrixXd MetricJets::ginv_value() const {
  Eigen::MatrixXd g(m_, m_);
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < m_; ++j) g(i, j) = ginvj_[idx2(i, j)].value();
  return g;
}

Array3<double> MetricJets::gamma_value() const {
  Array3<double> G({m_, m_, m_});
  for (int k = 0; k < m_; ++k)
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) G(k, i, j) = gamma_jet(k, i, j).value();
  return G;
}

CurvatureBundle MetricJets::bundle() const {
  const int m = m_;
  CurvatureBundle b;
  b.m = m;
  b.g = g_value();
  b.ginv = ginv_value();
  b.gamma = gamma_value();
  if (order_ < 2) return b;

  b.riem_up.reshape({m, m, m, m});
  b.riem_low.reshape({m, m, m, m});
  for (int l = 0; l < m; ++l)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) b.riem_up(l, i, j, k) = riem_jet(l, i, j, k).value();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          double s = 0.0;
          for (int mm = 0; mm < m; ++mm) s += b.g(l, mm) * b.riem_up(mm, i, j, k);
          b.riem_low(i, j, k, l) = s;
        }

  b.ricci.resize(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) b.ricci(i, j) = riccij_[idx2(i, j)].value();
  b.ricci_op = b.ginv * b.ricci;
  b.scalar = scalarj_.value();

  if (order_ < 3) return b;
  b.full = true;

  b.dscalar.resize(m);
  for (int a = 0; a < m; ++a) b.dscalar[a] = scalarj_.partial({a});

  b.nabla_s.reshape({m, m, m});
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = riccij_[idx2(i, j)].partial({a});
        for (int mm = 0; mm < m; ++mm) {
          s -= b.gamma(mm, a, i) * b.ricci(mm, j);
          s -= b.gamma(mm, a, j) * b.ricci(i, mm);
        }
        b.nabla_s(a, i, j) = s;
      }

  b.nabla_r.reshape({m, m, m, m, m});
  for (int a = 0; a < m; ++a)
    for (int l = 0; l < m; ++l)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          for (int k = 0; k < m; ++k) {
            double s = riem_jet(l, i, j, k).partial({a});
            for (int mm = 0; mm < m; ++mm) {
              s += b.gamma(l, a, mm) * b.riem_up(mm, i, j, k);
              s -= b.gamma(mm, a, i) * b.riem_up(l, mm, j, k);
              s -= b.gamma(mm, a, j) * b.riem_up(l, i, mm, k);
              s -= b.gamma(mm, a, k) * b.riem_up(l, i, j, mm);
            }
            b.nabla_r(a, l, i, j, k) = s;
          }
  return b;
}

// ---------------------------------------------------------------------------
// Operation entry points
// ---------------------------------------------------------------------------

namespace {

std::vector<int> all_dirs(int m) {
  std::vector<int> d(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) d[static_cast<std::size_t>(i)] = i;
  return d;
}

}  // namespace

Array3<double> christoffel(const MetricField& g, const Point& p) {
  // Value-only fast path: order-1 jets give g and dg; the inverse is plain
  // linear algebra. Semantics match the jet pipeline exactly.
  const int m = g.m;
  std::vector<int> dirs = all_dirs(m);
  Eigen::MatrixXd gv(m, m);
  Array3<double> dg({m, m, m});
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      const Jet jij = eval_jet(g.at(i, j), p, 1, dirs);
      gv(i, j) = gv(j, i) = jij.value();
      for (int a = 0; a < m; ++a) dg(a, i, j) = dg(a, j, i) = jij.partial({a});
    }
  Eigen::LLT<Eigen::MatrixXd> llt(gv);
  if (llt.info() != Eigen::Success)
    throw SingularMetric("metric not positive definite at evaluation point");
  const Eigen::MatrixXd ginv = llt.solve(Eigen::MatrixXd::Identity(m, m));
  Array3<double> G({m, m, m});
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        double s = 0.0;
        for (int l = 0; l < m; ++l)
          s += ginv(k, l) * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
        G(k, i, j) = G(k, j, i) = 0.5 * s;
      }
  return G;
}

CurvatureBundle riemann(const MetricField& g, const Point& p) {
  return MetricJets(g, p, 2).bundle();
}

CurvatureBundle curvature_bundle(const MetricField& g, const Point& p) {
  return MetricJets(g, p, 3).bundle();
}

RicciData ricci(const MetricField& g, const Point& p) {
  CurvatureBundle b = riemann(g, p);
  return {b.ricci, b.ricci_op, b.scalar};
}

// ---------------------------------------------------------------------------
// Covariant / Lie derivatives of expression fields
// ---------------------------------------------------------------------------

Eigen::MatrixXd cov_deriv_oneform(const MetricField& g, const OneFormExpr& w, const Point& p) {
  const int m = g.m;
  const Array3<double> G = christoffel(g, p);
  const auto dirs = all_dirs(m);
  Eigen::MatrixXd out(m, m);  // (a, i)
  std::vector<Jet> wj(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) wj[static_cast<std::size_t>(i)] = eval_jet(w.comp[static_cast<std::size_t>(i)], p, 1, dirs);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < m; ++i) {
      double s = wj[static_cast<std::size_t>(i)].partial({a});
      for (int mm = 0; mm < m; ++mm) s -= G(mm, a, i) * wj[static_cast<std::size_t>(mm)].value();
      out(a, i) = s;
    }
  return out;
}

Eigen::MatrixXd cov_deriv_vector(const MetricField& g, const VectorFieldExpr& v, const Point& p) {
  const int m = g.m;
  const Array3<double> G = christoffel(g, p);
  const auto dirs = all_dirs(m);
  Eigen::MatrixXd out(m, m);  // (a, i) = nabla_a V^i
  std::vector<Jet> vj(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) vj[static_cast<std::size_t>(i)] = eval_jet(v.comp[static_cast<std::size_t>(i)], p, 1, dirs);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < m; ++i) {
      double s = vj[static_cast<std::size_t>(i)].partial({a});
      for (int mm = 0; mm < m; ++mm) s += G(i, a, mm) * vj[static_cast<std::size_t>(mm)].value();
      out(a, i) = s;
    }
  return out;
}

Array3<double> cov_deriv_t11(const MetricField& g, const Tensor11Expr& T, const Point& p) {
  const int m = g.m;
  const Array3<double> G = christoffel(g, p);
  const auto dirs = all_dirs(m);
  std::vector<Jet> tj(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      tj[static_cast<std::size_t>(i * m + j)] = eval_jet(T.at(i, j), p, 1, dirs);
  Array3<double> out({m, m, m});  // (a, i, j) = nabla_a T^i_j
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = tj[static_cast<std::size_t>(i * m + j)].partial({a});
        for (int mm = 0; mm < m; ++mm) {
          s += G(i, a, mm) * tj[static_cast<std::size_t>(mm * m + j)].value();
          s -= G(mm, a, j) * tj[static_cast<std::size_t>(i * m + mm)].value();
        }
        out(a, i, j) = s;
      }
  return out;
}

Array3<double> cov_deriv_sym2(const MetricField& g, const SymTensor2Field& a, const Point& p) {
  const int m = g.m;
  const Array3<double> G = christoffel(g, p);
  const auto dirs = all_dirs(m);
  std::vector<Jet> aj(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      aj[static_cast<std::size_t>(i * m + j)] = eval_jet(a.at(i, j), p, 1, dirs);
  Array3<double> out({m, m, m});  // (c, i, j) = nabla_c a_ij
  for (int c = 0; c < m; ++c)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = aj[static_cast<std::size_t>(i * m + j)].partial({c});
        for (int mm = 0; mm < m; ++mm) {
          s -= G(mm, c, i) * aj[static_cast<std::size_t>(mm * m + j)].value();
          s -= G(mm, c, j) * aj[static_cast<std::size_t>(i * m + mm)].value();
        }
        out(c, i, j) = s;
      }
  return out;
}

Eigen::MatrixXd lie_metric(const MetricField& g, const VectorFieldExpr& V, const Point& p) {
  std::vector<Jet> lj = lie_metric_jets(g, V, p, 0);
  const int m = g.m;
  Eigen::MatrixXd out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out(i, j) = lj[static_cast<std::size_t>(i * m + j)].value();
  return out;
}

std::vector<Jet> lie_metric_jets(const MetricField& g, const VectorFieldExpr& V,
                                 const Point& p, int order) {
  const int m = g.m;
  const auto dirs = all_dirs(m);
  std::vector<Jet> gj(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
  std::vector<Jet> vj(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      gj[static_cast<std::size_t>(i * m + j)] = eval_jet(g.at(i, j), p, order + 1, dirs);
  for (int k = 0; k < m; ++k) vj[static_cast<std::size_t>(k)] = eval_jet(V.comp[static_cast<std::size_t>(k)], p, order + 1, dirs);

  // (L_V g)_ij = g_ik d_j V^k + g_jk d_i V^k + V^k d_k g_ij
  std::vector<Jet> out(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
  const JetSpace& osp = JetSpace::get(m, order);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      Jet acc(osp);
      for (int k = 0; k < m; ++k) {
        acc += gj[static_cast<std::size_t>(i * m + k)].truncated(order) * vj[static_cast<std::size_t>(k)].deriv(j);
        acc += gj[static_cast<std::size_t>(j * m + k)].truncated(order) * vj[static_cast<std::size_t>(k)].deriv(i);
        acc += vj[static_cast<std::size_t>(k)].truncated(order) * gj[static_cast<std::size_t>(i * m + j)].deriv(k);
      }
      out[static_cast<std::size_t>(i * m + j)] = acc;
      out[static_cast<std::size_t>(j * m + i)] = std::move(acc);
    }
  return out;
}

Array3<double> cov_deriv_sym2_jets(const MetricJets& mj, const std::vector<Jet>& a) {
  const int m = mj.m();
  Array3<double> out({m, m, m});
  for (int c = 0; c < m; ++c)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = a[static_cast<std::size_t>(i * m + j)].partial({c});
        for (int mm = 0; mm < m; ++mm) {
          s -= mj.gamma_jet(mm, c, i).value() * a[static_cast<std::size_t>(mm * m + j)].value();
          s -= mj.gamma_jet(mm, c, j).value() * a[static_cast<std::size_t>(i * m + mm)].value();
        }
        out(c, i, j) = s;
      }
  return out;
}

double sectional_curvature(const CurvatureBundle& b, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& v) {
  const int m = b.m;
  double ruvvu = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
          ruvvu += b.riem_low(i, j, k, l) * u[i] * v[j] * v[k] * u[l];
  const double gu = u.dot(b.g * u), gv = v.dot(b.g * v), guv = u.dot(b.g * v);
  const double denom = gu * gv - guv * guv;
  if (std::abs(denom) < 1e-14) throw InvalidParam("degenerate plane for sectional curvature");
  return ruvvu / denom;
}

CurvatureChecks curvature_checks(const MetricField& g, const Point& p) {
  CurvatureBundle b = curvature_bundle(g, p);
  const int m = b.m;
  Frame fr(b.g);
  CurvatureChecks c;

  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        c.gamma_sym = std::max(c.gamma_sym, std::abs(b.gamma(k, i, j) - b.gamma(k, j, i)));

  Array4<double> rl = fr.cov4(b.riem_low);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          c.antisym_12 = std::max(c.antisym_12, std::abs(rl(i, j, k, l) + rl(j, i, k, l)));
          c.antisym_34 = std::max(c.antisym_34, std::abs(rl(i, j, k, l) + rl(i, j, l, k)));
          c.pair_sym = std::max(c.pair_sym, std::abs(rl(i, j, k, l) - rl(k, l, i, j)));
          c.bianchi1 = std::max(
              c.bianchi1, std::abs(rl(i, j, k, l) + rl(j, k, i, l) + rl(k, i, j, l)));
        }

  c.ricci_sym = fr.cov2(b.ricci - b.ricci.transpose().eval()).cwiseAbs().maxCoeff();

  double tr = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) tr += b.ginv(i, j) * b.ricci(i, j);
  c.trace_identity = std::abs(tr - b.scalar) / std::max(1.0, std::abs(b.scalar));

  // div S = grad r / 2 (contracted second Bianchi identity).
  Eigen::VectorXd divs(m);
  for (int j = 0; j < m; ++j) {
    double s = 0.0;
    for (int a = 0; a < m; ++a)
      for (int bb = 0; bb < m; ++bb) s += b.ginv(a, bb) * b.nabla_s(a, bb, j);
    divs[j] = s;
  }
  c.contracted_bianchi2 = fr.covec_norm(divs - 0.5 * b.dscalar);
  return c;
}

}  // namespace fkgeo
