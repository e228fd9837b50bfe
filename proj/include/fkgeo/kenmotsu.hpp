#pragma once

#include <map>
#include <string>

#include "fkgeo/model.hpp"

namespace fkgeo {

struct FiberSpec {
  bool curved = false;
  double k = 0.0;  // constant fiber curvature, k < 0, only for n = 1

  static FiberSpec flat() { return {}; }
  static FiberSpec constant_curvature(double k) { return {true, k}; }
};

// Warped-product builders: g = dt^2 + e^{2W(t)} g_N over a Kaehler fiber,
// xi = d/dt, eta = dt, phi = the fiber complex structure.
Model build_beta_kenmotsu(int n, double beta, FiberSpec fiber = FiberSpec::flat(),
                          std::pair<double, double> t_interval = {0.0, 1.0});
Model build_f_kenmotsu(int n, const KenmotsuFunction& family,
                       std::pair<double, double> t_interval);

// Control models.
Model build_flat(int m);
Model build_product_h2xr();

// Residual report keyed by check name; values are max residuals over the
// sampled points (orthonormal-frame components throughout).
using ResidualReport = std::map<std::string, double>;

// Axioms (1.1)(a)-(f) of the almost contact metric structure.
ResidualReport verify_structure(const Model& model, int samples, std::uint64_t seed);

// Defining equation and the structural identities:
//   eq_1_2  (nabla_X phi)Y = f (g(phi X, Y) xi - eta(Y) phi X)
//   eq_1_3  nabla_X xi = f (X - eta(X) xi)
//   eq_1_4  R(X,Y)xi = f^2 (eta(X) Y - eta(Y) X) + Y(f) phi^2 X - X(f) phi^2 Y
//   eq_1_5  S(xi,xi) = -2n (f^2 + xi(f))   (curvature pipeline vs formula)
//   eq_1_6  Q(xi) = -2n f^2 xi - xi(f) xi - (2n-1) grad f
ResidualReport verify_kenmotsu_identities(const Model& model, int samples,
                                          std::uint64_t seed);

// Dimension-3 Ricci closed form:
//   S = (r/2 + xi(f) + f^2) g - (r/2 + xi(f) + 3 f^2) eta x eta
//       - Y(f) eta(X) - X(f) eta(Y)
double verify_dim3_ricci(const Model& model, int samples, std::uint64_t seed);

struct EtaEinsteinFit {
  double a_mean = 0.0, b_mean = 0.0;
  double a_spread = 0.0, b_spread = 0.0;
  double residual = 0.0;  // max |S - a g - b eta x eta| after the pointwise fit
  // For f == 1 models: deviation from a = r/2n + 1, b = -(r/2n + 2n + 1).
  bool coeff_identity_applicable = false;
  double coeff_identity_residual = 0.0;
};
EtaEinsteinFit eta_einstein_fit(const Model& model, int samples, std::uint64_t seed);

}  // namespace fkgeo
