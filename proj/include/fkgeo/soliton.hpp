#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fkgeo/model.hpp"

namespace fkgeo {

// alpha = L_V g + 2 S at p.
Eigen::MatrixXd soliton_tensor(const Model& model, const VectorFieldExpr& V,
                               const Point& p);

struct SolitonReport {
  std::string v_desc;
  // lambda from the (xi,xi) slot: -1/2 alpha(xi,xi) / g(xi,xi).
  double lambda_xi = 0.0;
  double lambda_xi_spread = 0.0;
  // Agreement between lambda_xi computed from the assembled alpha and from
  // (L_V g)(xi,xi) + 2 S(xi,xi) combined directly (definitional identity).
  double lambda_xi_consistency = 0.0;
  // Global least squares over samples minimizing ||alpha + 2 lambda g||.
  double lambda_star = 0.0;
  double residual_max = 0.0;      // max |alpha + 2 lambda* g| (frame)
  double residual_xi_max = 0.0;   // max |alpha + 2 lambda_xi g| (frame)
  double nabla_alpha_max = 0.0;   // max |nabla alpha| (frame)
  std::string soliton_class;      // shrinking | steady | expanding
  double r_min = 0.0, r_max = 0.0;
  double r_abs_spread = 0.0;      // max|r| - min|r| over samples
  int samples = 0;
  std::uint64_t seed = 0;
};

// Classification dead band: |lambda*| below this reports "steady".
inline constexpr double kSolitonDeadBand = 1e-9;

SolitonReport solve_lambda(const Model& model, const VectorFieldExpr& V, int samples,
                           std::uint64_t seed);

// Printed closed forms for alpha = L_xi g + 2S and nabla alpha, verified
// against the direct computation. Keys present only when applicable:
//   eq_2_11 (n=1), eq_2_12 / eq_2_13 (n=1, constant f),
//   eq_2_15 / eq_2_16 (f == 1, eta-Einstein coefficient b constant).
std::map<std::string, double> verify_alpha_formulas(const Model& model, int samples,
                                                    std::uint64_t seed);

struct SWRSReport {
  std::vector<Eigen::VectorXd> rho;  // per-point fitted 1-form (frame components)
  double rho_norm_max = 0.0;   // max ||rho||_g over samples
  double residual_max = 0.0;   // max residual of (2.7) after the fit
  double eq_2_8_residual = 0.0;  // xi(S(xi,xi)) - 4 rho(xi) S(xi,xi)
  int ricci_rank_min = 0;
  int samples = 0;
};

// Pointwise least-squares fit of the 1-form rho in
// (nabla_X S)(Y,Z) = 2 rho(X) S(Y,Z) + rho(Y) S(Z,X) + rho(Z) S(X,Y).
// Throws DegenerateRicci when S is numerically singular at a sample.
SWRSReport swrs_test(const Model& model, int samples, std::uint64_t seed);

struct SemisymmetryReport {
  double rs_residual_max = 0.0;       // max |(R(X,Y).S)(X1,X2)| (frame)
  double einstein_residual_max = 0.0; // max |S - (r/m) g| (frame)
  int samples = 0;
};

SemisymmetryReport ricci_semisymmetry_test(const Model& model, int samples,
                                           std::uint64_t seed);

// max |dr|_g over samples.
double scalar_constancy(const Model& model, int samples, std::uint64_t seed);

// The xi field of a contact model (components are constants on the catalog).
VectorFieldExpr xi_field(const Model& model);

}  // namespace fkgeo
