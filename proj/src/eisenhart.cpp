#include "fkgeo/eisenhart.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "fkgeo/curvature.hpp"
#include "fkgeo/transport.hpp"

namespace fkgeo {

int sym_dim(int m) { return m * (m + 1) / 2; }

int sym_index(int m, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * m - i * (i - 1) / 2 + (j - i);
}

Eigen::VectorXd sym_vec(const Eigen::MatrixXd& a) {
  const int m = static_cast<int>(a.rows());
  Eigen::VectorXd v(sym_dim(m));
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) v[sym_index(m, i, j)] = a(i, j);
  return v;
}

Eigen::MatrixXd sym_unvec(int m, const Eigen::VectorXd& v) {
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) a(i, j) = a(j, i) = v[sym_index(m, i, j)];
  return a;
}

namespace {

// Rows realizing alpha(A Z, W) + alpha(Z, A W) = 0 for Z, W in the
// coordinate basis (Z <= W), for an endomorphism A^i_j.
void append_endomorphism_rows(const Eigen::MatrixXd& A, const std::string& tag,
                              ConstraintMatrix& cm) {
  const int m = static_cast<int>(A.rows());
  const int N = sym_dim(m);
  const int base = static_cast<int>(cm.rows.rows());
  cm.rows.conservativeResize(base + N, N);
  cm.rows.middleRows(base, N).setZero();
  for (int k = 0; k < m; ++k)
    for (int l = k; l < m; ++l) {
      Eigen::VectorXd row = Eigen::VectorXd::Zero(N);
      for (int mm = 0; mm < m; ++mm) {
        row[sym_index(m, mm, l)] += A(mm, k);  // alpha(A e_k, e_l)
        row[sym_index(m, k, mm)] += A(mm, l);  // alpha(e_k, A e_l)
      }
      cm.rows.row(base + sym_index(m, k, l)) = row;
      cm.provenance.push_back(tag);
    }
}

Eigen::MatrixXd curvature_endomorphism(const CurvatureBundle& b, int i, int j) {
  const int m = b.m;
  Eigen::MatrixXd A(m, m);
  for (int l = 0; l < m; ++l)
    for (int k = 0; k < m; ++k) A(l, k) = b.riem_up(l, i, j, k);
  return A;
}

Eigen::MatrixXd nabla_r_endomorphism(const CurvatureBundle& b, int a, int i, int j) {
  const int m = b.m;
  Eigen::MatrixXd A(m, m);
  for (int l = 0; l < m; ++l)
    for (int k = 0; k < m; ++k) A(l, k) = b.nabla_r(a, l, i, j, k);
  return A;
}

}  // namespace

ConstraintMatrix curvature_constraints(const Model& model, const Point& p) {
  const CurvatureBundle b = riemann(model.g, p);
  const int m = model.m();
  ConstraintMatrix cm;
  cm.m = m;
  cm.rows.resize(0, sym_dim(m));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      append_endomorphism_rows(curvature_endomorphism(b, i, j),
                               "curvature@base(" + std::to_string(i) + "," +
                                   std::to_string(j) + ")",
                               cm);
  return cm;
}

double metric_nullspace_residual(const ConstraintMatrix& cm, const Eigen::MatrixXd& g) {
  if (cm.rows.rows() == 0) return 0.0;
  const Eigen::VectorXd gv = sym_vec(g).normalized();
  // Normalized against the matrix scale, not per-row norms: rows that are
  // themselves numerically zero (nabla R on symmetric spaces) must not turn
  // rounding noise into O(1) ratios.
  double scale = 0.0;
  for (int r = 0; r < cm.rows.rows(); ++r)
    scale = std::max(scale, cm.rows.row(r).norm());
  if (scale == 0.0) return 0.0;
  return (cm.rows * gv).cwiseAbs().maxCoeff() / scale;
}

Eigen::MatrixXd ParallelSpaceReport::basis_tensor(int k) const {
  const int m = static_cast<int>(basepoint.size());
  return sym_unvec(m, basis.col(k));
}

ParallelSpaceReport parallel_space(const Model& model, const Point& basepoint,
                                   int remote_samples, std::uint64_t seed,
                                   const ParallelSpaceOptions& opts) {
  const int m = model.m();
  const int N = sym_dim(m);
  Rng rng(seed);

  const CurvatureBundle base = curvature_bundle(model.g, basepoint);

  ConstraintMatrix cm;
  cm.m = m;
  cm.rows.resize(0, N);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      append_endomorphism_rows(curvature_endomorphism(base, i, j), "curvature@base", cm);

  if (opts.include_nabla_r) {
    for (int a = 0; a < m; ++a)
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
          append_endomorphism_rows(nabla_r_endomorphism(base, a, i, j), "nabla_r@base", cm);
  }

  // Remote curvature pulled back to the base frame: with F the transported
  // coordinate frame at q, the constraint endomorphism acting on base
  // components is F^{-1} R_q(X,Y) F.
  for (int s = 0; s < remote_samples; ++s) {
    const Point q = rng.point_in(model.chart);
    const Eigen::MatrixXd F =
        parallel_transport(model.g, Polyline::segment(basepoint, q),
                           Eigen::MatrixXd::Identity(m, m), TransportKind::Frame);
    const Eigen::MatrixXd Finv = F.inverse();
    const CurvatureBundle bq = riemann(model.g, q);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        append_endomorphism_rows(Finv * curvature_endomorphism(bq, i, j) * F,
                                 "curvature@remote" + std::to_string(s), cm);
  }

  ParallelSpaceReport rep;
  rep.basepoint = basepoint;
  rep.cap_flat = N;
  rep.cap_ms = 1 + (m - 2) * (m - 1) / 2;
  rep.metric_residual = metric_nullspace_residual(cm, base.g);

  Eigen::BDCSVD<Eigen::MatrixXd> svd(cm.rows, Eigen::ComputeFullV);
  Eigen::VectorXd sv = Eigen::VectorXd::Zero(N);
  const int nsv = static_cast<int>(svd.singularValues().size());
  sv.head(nsv) = svd.singularValues();
  rep.singular_values = sv;

  const NullspaceCall call = call_nullspace_dimension(sv, opts.gap_min);
  rep.d = call.d;
  rep.sqfi_count = call.d;
  rep.smallest_retained = call.smallest_retained;
  rep.largest_discarded = call.largest_discarded;
  rep.gap_ratio = call.gap_ratio;

  rep.basis = svd.matrixV().rightCols(rep.d);

  // Loop-transport verification: candidates must return unchanged around
  // coordinate rectangles based at the base point.
  std::vector<Polyline> loops;
  for (int l = 0; l < opts.loops; ++l) {
    int ai = static_cast<int>(rng.uniform(0.0, m));
    ai = std::min(ai, m - 1);
    int aj = static_cast<int>(rng.uniform(0.0, m - 1));
    aj = std::min(aj, m - 2);
    if (aj >= ai) ++aj;
    auto side = [&](int axis) {
      const auto& [lo, hi] = model.chart.box[static_cast<std::size_t>(axis)];
      const double width = (hi - lo) * opts.loop_side_fraction;
      const double room_up = hi - basepoint[static_cast<std::size_t>(axis)];
      return room_up >= width ? width : -width;
    };
    loops.push_back(Polyline::rectangle(basepoint, ai, aj, side(ai), side(aj)));
  }

  for (int k = 0; k < d; ++k) {
    const Eigen::MatrixXd a0 = rep.basis_tensor(k);
    const double scale = a0.cwiseAbs().maxCoeff();
    double worst = 0.0;
    for (const auto& loop : loops) {
      const Eigen::MatrixXd a1 =
          parallel_transport(model.g, loop, a0, TransportKind::Cov2);
      worst = std::max(worst, (a1 - a0).cwiseAbs().maxCoeff() / scale);
    }
    rep.transport_residuals.push_back(worst);
    if (worst > opts.transport_tol)
      throw TransportInconsistent(
          "claimed-parallel tensor drifted under loop transport: " +
              std::to_string(worst),
          worst);
  }
  return rep;
}

SqfiCount sqfi_count(const Model& model, const Point& basepoint, int samples,
                     std::uint64_t seed) {
  ParallelSpaceReport rep = parallel_space(model, basepoint, samples, seed);
  SqfiCount out;
  out.count = rep.d;
  out.ms_bound = rep.cap_ms;
  out.flat_cap = rep.cap_flat;
  out.below_ms = out.count < out.ms_bound;
  return out;
}

ReducibilityVerdict reducibility_verdict(const Model& model,
                                         const ParallelSpaceReport& report) {
  ReducibilityVerdict v;
  v.d = report.d;
  v.irreducible = report.d == 1;
  if (v.irreducible) return v;

  // Orthogonalize the candidate basis against vec(g); the remaining
  // directions are the non-metric parallel tensors.
  const Eigen::MatrixXd g = model.g.value(report.basepoint);
  const Eigen::VectorXd gv = sym_vec(g).normalized();
  Eigen::MatrixXd basis = report.basis;
  Eigen::MatrixXd complement(basis.rows(), 0);
  for (int k = 0; k < basis.cols(); ++k) {
    Eigen::VectorXd w = basis.col(k) - gv * gv.dot(basis.col(k));
    for (int c = 0; c < complement.cols(); ++c)
      w -= complement.col(c) * complement.col(c).dot(w);
    if (w.norm() > 1e-8) {
      complement.conservativeResize(Eigen::NoChange, complement.cols() + 1);
      complement.col(complement.cols() - 1) = w.normalized();
    }
  }
  const int m = model.m();
  for (int c = 0; c < complement.cols(); ++c)
    v.non_metric_basis.push_back(sym_unvec(m, complement.col(c)));
  return v;
}

SymTensor2Field extend_parallel_tensor(const Model& model, const Point& basepoint,
                                       const Eigen::MatrixXd& candidate) {
  const int m = model.m();
  const Eigen::MatrixXd g0 = model.g.value(basepoint);
  const double scale = candidate.cwiseAbs().maxCoeff();
  const double tol = 1e-8 * std::max(1.0, scale);

  // Multiple of g: c = <candidate, g> / <g, g>.
  {
    const double c = (candidate.cwiseProduct(g0)).sum() / (g0.cwiseProduct(g0)).sum();
    if ((candidate - c * g0).cwiseAbs().maxCoeff() < tol) {
      SymTensor2Field a = SymTensor2Field::zero(m);
      for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) a.set(i, j, c * model.g.at(i, j));
      return a;
    }
  }

  if (model.name.rfind("flat", 0) == 0) {
    // Flat chart: every parallel field has constant components.
    SymTensor2Field a = SymTensor2Field::zero(m);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) a.set(i, j, ScalarExpr::constant(candidate(i, j)));
    return a;
  }

  if (model.name == "product_h2xr") {
    // Parallel fields are c1 dt^2 + c2 g_{H2}.
    const double c1 = candidate(0, 0);
    const double c2 = candidate(1, 1);
    Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(m, m);
    rebuilt(0, 0) = c1;
    rebuilt(1, 1) = c2;
    rebuilt(2, 2) = c2 * g0(2, 2);
    if ((candidate - rebuilt).cwiseAbs().maxCoeff() < tol) {
      SymTensor2Field a = SymTensor2Field::zero(m);
      a.set(0, 0, ScalarExpr::constant(c1));
      a.set(1, 1, ScalarExpr::constant(c2));
      a.set(2, 2, c2 * model.g.at(2, 2));
      return a;
    }
  }

  throw NotApplicable("no closed-form parallel extension known for this candidate");
}

}  // namespace fkgeo
