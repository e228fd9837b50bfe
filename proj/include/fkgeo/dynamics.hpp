#pragma once

#include <vector>

#include <Eigen/Core>

#include "fkgeo/model.hpp"

namespace fkgeo {

struct GeodesicTrace {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> xs;  // positions
  std::vector<Eigen::VectorXd> vs;  // velocities
  std::vector<double> energy;       // g(v, v) per step
  double energy_drift = 0.0;        // max |E - E0| / E0
  bool domain_exit = false;         // truncated at the hard chart limits
};

struct GeodesicOptions {
  double drift_tol = 1e-6;
  bool throw_on_coarse = true;
  bool normalize_velocity = true;  // scale v0 to unit g-norm
};

// Classical 4th-order integration of the geodesic equation
// x'' + Gamma(x)(x', x') = 0 from (x0, v0) over duration T with step h.
// Throws StepTooCoarse when the kinetic-energy self check fails (unless
// disabled); truncates with a flag when the trace leaves the hard chart box.
GeodesicTrace integrate_geodesic(const Model& model, const Point& x0,
                                 const Eigen::VectorXd& v0, double T, double h,
                                 const GeodesicOptions& opts = {});

// Per-step values of F = a_ij x'^i x'^j along the trace.
std::vector<double> qfi_series(const GeodesicTrace& trace, const SymTensor2Field& a);

// Max relative drift of F along the trace.
double qfi_drift(const GeodesicTrace& trace, const SymTensor2Field& a);

struct KillingTypeReport {
  double killing_residual = 0.0;  // max |a_{ij;k} + a_{jk;i} + a_{ki;j}| (frame)
  double sqfi_residual = 0.0;     // max |a_{ij;k}| (frame)
};

// Residuals of the Killing-type equations for a symmetric 2-tensor field.
KillingTypeReport killing_type_residual(const Model& model, const SymTensor2Field& a,
                                        int samples, std::uint64_t seed);

struct ConformalFitReport {
  double c = 0.0;               // best constant in L_X g = c g
  double residual = 0.0;        // max |L_X g - c g| (frame)
  double affine_residual = 0.0; // max |nabla (L_X g)| (frame)
};

// Fit of the conformal factor for a candidate vector field, plus the
// affine-Killing residual nabla(L_X g).
ConformalFitReport conformal_fit(const Model& model, const VectorFieldExpr& X,
                                 int samples, std::uint64_t seed);

// Fiber rotation x1 d/dx2 - x2 d/dx1 (a Killing field on every catalog model).
VectorFieldExpr fiber_rotation_field(int m);

}  // namespace fkgeo
