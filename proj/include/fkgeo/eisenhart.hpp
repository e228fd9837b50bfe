#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "fkgeo/model.hpp"

namespace fkgeo {

// vec(Sym^2) indexing: entries (i,j) with i <= j, row-major over the upper
// triangle; N = m(m+1)/2.
int sym_dim(int m);
int sym_index(int m, int i, int j);
Eigen::VectorXd sym_vec(const Eigen::MatrixXd& a);
Eigen::MatrixXd sym_unvec(int m, const Eigen::VectorXd& v);

// Linear constraints on vec(Sym^2 T_pM) collected from the symmetrized
// action of curvature endomorphisms: every parallel alpha satisfies
// alpha(R(X,Y)Z, W) + alpha(Z, R(X,Y)W) = 0, and the same with nabla R.
struct ConstraintMatrix {
  int m = 0;
  Eigen::MatrixXd rows;               // K x N
  std::vector<std::string> provenance;  // one tag per row
};

// Constraint rows from the curvature endomorphisms R(e_i, e_j), i < j, at p.
ConstraintMatrix curvature_constraints(const Model& model, const Point& p);

// Max |row . vec(g)| / ||row|| over rows: g must always be annihilated.
double metric_nullspace_residual(const ConstraintMatrix& cm, const Eigen::MatrixXd& g);

struct ParallelSpaceReport {
  int d = 0;                       // nullspace dimension
  Eigen::MatrixXd basis;           // N x d, orthonormal in vec coordinates
  Eigen::VectorXd singular_values; // descending
  double smallest_retained = 0.0;
  double largest_discarded = 0.0;
  double gap_ratio = 0.0;          // smallest retained / largest discarded
  std::vector<double> transport_residuals;  // per basis tensor, over loops
  double metric_residual = 0.0;    // g-in-nullspace check
  int sqfi_count = 0;              // = d
  int cap_flat = 0;                // m(m+1)/2
  int cap_ms = 0;                  // M_S(m) = 1 + (m-2)(m-1)/2
  Point basepoint;

  Eigen::MatrixXd basis_tensor(int k) const;
};

struct ParallelSpaceOptions {
  int remote_samples = 8;
  int loops = 3;
  double loop_side_fraction = 0.3;
  double gap_min = 1e6;
  double transport_tol = 1e-6;
  bool include_nabla_r = true;
};

// Call the nullspace dimension from a descending singular-value spectrum.
// Refuses to guess: throws GapTooSmall when the retained/discarded ratio is
// below gap_min.
struct NullspaceCall {
  int d = 0;
  double smallest_retained = 0.0;
  double largest_discarded = 0.0;
  double gap_ratio = 0.0;
};
NullspaceCall call_nullspace_dimension(const Eigen::VectorXd& singular_values,
                                       double gap_min);

// Assemble curvature constraints at the base point, nabla-R constraints,
// and curvature constraints at remote sampled points pulled back through
// parallel-transported frames; call the nullspace dimension by SVD and
// verify each candidate under random-loop transport.
// Throws GapTooSmall / TransportInconsistent as documented.
ParallelSpaceReport parallel_space(const Model& model, const Point& basepoint,
                                   int remote_samples, std::uint64_t seed,
                                   const ParallelSpaceOptions& opts = {});

struct SqfiCount {
  int count = 0;
  int ms_bound = 0;    // M_S(m)
  int flat_cap = 0;    // m(m+1)/2
  bool below_ms = false;  // count < M_S(m)
};
SqfiCount sqfi_count(const Model& model, const Point& basepoint, int samples,
                     std::uint64_t seed);

struct ReducibilityVerdict {
  bool irreducible = false;
  int d = 0;
  // Basis of the complement of span{g} inside the parallel space; eigenspaces
  // of these witness candidate splittings.
  std::vector<Eigen::MatrixXd> non_metric_basis;
};
ReducibilityVerdict reducibility_verdict(const Model& model,
                                         const ParallelSpaceReport& report);

// Closed-form field extension of a parallel candidate found at the base
// point, for models whose parallel fields are known in closed form:
// multiples of g always; constant-component fields on the flat model;
// block combinations on the product model. Throws NotApplicable when the
// candidate does not match any known extension to 1e-8.
SymTensor2Field extend_parallel_tensor(const Model& model, const Point& basepoint,
                                       const Eigen::MatrixXd& candidate);

}  // namespace fkgeo
