// Acceptance suite: runs every top-level requirement at its pinned tolerance
// and prints one pass/fail line per criterion. Exits nonzero on any failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fkgeo/curvature.hpp"
#include "fkgeo/dynamics.hpp"
#include "fkgeo/eisenhart.hpp"
#include "fkgeo/kenmotsu.hpp"
#include "fkgeo/runner.hpp"
#include "fkgeo/soliton.hpp"
#include "fkgeo/transport.hpp"

using namespace fkgeo;

namespace {

struct Harness {
  int failures = 0;

  void criterion(int num, const std::string& label, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", num, label.c_str(),
                detail.empty() ? "" : "  -- ", detail.c_str());
    if (!ok) ++failures;
  }
};

struct CatalogEntry {
  std::string label;
  Model model;
};

std::vector<CatalogEntry> acceptance_catalog() {
  std::vector<CatalogEntry> cat;
  cat.push_back({"beta=0.5 n=1 flat", build_beta_kenmotsu(1, 0.5)});
  cat.push_back({"beta=1 n=1 flat (H3)", build_beta_kenmotsu(1, 1.0)});
  cat.push_back({"beta=2 n=1 flat", build_beta_kenmotsu(1, 2.0)});
  cat.push_back({"beta=1 n=2 flat (H5)", build_beta_kenmotsu(2, 1.0)});
  cat.push_back({"beta=1 n=1 curved k=-1", build_beta_kenmotsu(1, 1.0, FiberSpec::constant_curvature(-1.0))});
  cat.push_back({"f=1+0.5exp(-t) n=1",
                 build_f_kenmotsu(1, KenmotsuFunction::affine_exponential(1.0, 0.5, -1.0), {0.0, 1.0})});
  return cat;
}

bool worse(std::string& detail, const std::string& where, double value, double tol) {
  std::ostringstream os;
  os << where << " residual " << value << " exceeds " << tol;
  detail = os.str();
  return false;
}

}  // namespace

int main() {
  Harness h;
  const int kSamples = 100;
  const std::uint64_t kSeed = 20240915;

  auto catalog = acceptance_catalog();

  // 1. Structure axioms (1.1)(a)-(f) on the whole catalog.
  h.criterion(1, "structure axioms (1.1)(a)-(f) < 1e-9 on the catalog", [&](std::string& detail) {
    for (const auto& [label, model] : catalog) {
      const auto rep = verify_structure(model, kSamples, kSeed);
      for (const auto& [name, residual] : rep)
        if (!(residual < 1e-9)) return worse(detail, label + " " + name, residual, 1e-9);
    }
    return true;
  });

  // 2. Defining identities (1.2)-(1.6), with (1.5) checked two-sided.
  h.criterion(2, "identities (1.2)-(1.6) < 1e-8 on the catalog", [&](std::string& detail) {
    for (const auto& [label, model] : catalog) {
      const auto rep = verify_kenmotsu_identities(model, kSamples, kSeed);
      for (const auto& [name, residual] : rep)
        if (!(residual < 1e-8)) return worse(detail, label + " " + name, residual, 1e-8);
    }
    return true;
  });

  // 3. Dim-3 Ricci closed form (2.10) on flat and curved fibers.
  h.criterion(3, "dim-3 Ricci formula (2.10) < 1e-8, constant and varying r", [&](std::string& detail) {
    auto flat3 = build_beta_kenmotsu(1, 1.0);
    const double res_flat = verify_dim3_ricci(flat3, kSamples, kSeed);
    if (!(res_flat < 1e-8)) return worse(detail, "flat fiber", res_flat, 1e-8);
    const double r_h3 = ricci(flat3.g, flat3.center()).r;
    if (!(std::abs(r_h3 + 6.0) < 1e-10)) return worse(detail, "H3 scalar vs -6", std::abs(r_h3 + 6.0), 1e-10);

    auto curved = build_beta_kenmotsu(1, 1.0, FiberSpec::constant_curvature(-1.0));
    const double res_curved = verify_dim3_ricci(curved, kSamples, kSeed);
    if (!(res_curved < 1e-8)) return worse(detail, "curved fiber", res_curved, 1e-8);
    const double r0 = ricci(curved.g, Point{0.1, 0.0, 0.0}).r;
    const double r1 = ricci(curved.g, Point{0.9, 0.0, 0.0}).r;
    if (!(std::abs(r0 - r1) > 1e-2)) return worse(detail, "curved-fiber r spread", std::abs(r0 - r1), 1e-2);
    return true;
  });

  // 4. Eisenhart theorem: d = 1 with basis ~ g on every regular model;
  //    controls flat (d=6) and H2xR (d=2); gap ratio >= 1e6 throughout.
  h.criterion(4, "parallel space: d=1 basis~g on regular models; flat d=6; H2xR d=2", [&](std::string& detail) {
    for (const auto& [label, model] : catalog) {
      const Point base = model.center();
      const auto rep = parallel_space(model, base, 6, kSeed);
      if (rep.d != 1) {
        detail = label + " d=" + std::to_string(rep.d);
        return false;
      }
      if (!(rep.gap_ratio >= 1e6)) return worse(detail, label + " gap", rep.gap_ratio, 1e6);
      Eigen::VectorXd cand = rep.basis.col(0);
      Eigen::VectorXd gv = sym_vec(model.g.value(base)).normalized();
      if (cand.dot(gv) < 0) cand = -cand;
      const double dev = (cand - gv).cwiseAbs().maxCoeff();
      if (!(dev < 1e-8)) return worse(detail, label + " basis vs g", dev, 1e-8);
    }
    auto flat = build_flat(3);
    const auto frep = parallel_space(flat, flat.center(), 4, kSeed);
    if (frep.d != 6) {
      detail = "flat d=" + std::to_string(frep.d);
      return false;
    }
    if (!(frep.gap_ratio >= 1e6)) return worse(detail, "flat gap", frep.gap_ratio, 1e6);
    auto prod = build_product_h2xr();
    const auto prep = parallel_space(prod, prod.center(), 6, kSeed);
    if (prep.d != 2) {
      detail = "H2xR d=" + std::to_string(prep.d);
      return false;
    }
    if (!(prep.gap_ratio >= 1e6)) return worse(detail, "H2xR gap", prep.gap_ratio, 1e6);
    return true;
  });

  // 5. SQFI counts and the M_S bound.
  h.criterion(5, "SQFI counts: regular 1 < M_S(m); M_S(3)=2, M_S(5)=7; flat 6", [&](std::string& detail) {
    for (const auto& [label, model] : catalog) {
      const auto c = sqfi_count(model, model.center(), 4, kSeed);
      if (c.count != 1 || !c.below_ms) {
        detail = label + " count=" + std::to_string(c.count);
        return false;
      }
      const int n = model.n;
      if (c.ms_bound != 1 + n * (2 * n - 1)) {
        detail = label + " M_S=" + std::to_string(c.ms_bound);
        return false;
      }
    }
    const auto c3 = sqfi_count(build_beta_kenmotsu(1, 1.0), Point{0.5, 0.0, 0.0}, 3, kSeed);
    if (c3.ms_bound != 2) {
      detail = "M_S(3)=" + std::to_string(c3.ms_bound);
      return false;
    }
    const auto c5 = sqfi_count(build_beta_kenmotsu(2, 1.0), Point{0.5, 0.0, 0.0, 0.0, 0.0}, 3, kSeed);
    if (c5.ms_bound != 7) {
      detail = "M_S(5)=" + std::to_string(c5.ms_bound);
      return false;
    }
    auto flat = build_flat(3);
    const auto cf = sqfi_count(flat, flat.center(), 3, kSeed);
    if (cf.count != 6) {
      detail = "flat count=" + std::to_string(cf.count);
      return false;
    }
    return true;
  });

  // 6. Soliton constants and the printed alpha formulas.
  h.criterion(6, "lambda_xi = 2 beta^2 / 2n (expanding); formulas (2.11)-(2.16) < 1e-8", [&](std::string& detail) {
    const std::vector<std::pair<double, double>> betas{{0.5, 0.5}, {1.0, 2.0}, {2.0, 8.0}};
    for (const auto& [beta, expect] : betas) {
      auto model = build_beta_kenmotsu(1, beta);
      const auto rep = solve_lambda(model, xi_field(model), 50, kSeed);
      if (!(std::abs(rep.lambda_xi - expect) < 1e-8))
        return worse(detail, "lambda_xi beta=" + std::to_string(beta),
                     std::abs(rep.lambda_xi - expect), 1e-8);
      if (rep.soliton_class != "expanding") {
        detail = "class(beta=" + std::to_string(beta) + ")=" + rep.soliton_class;
        return false;
      }
    }
    for (int n : {1, 2}) {
      auto model = build_beta_kenmotsu(n, 1.0);
      const auto rep = solve_lambda(model, xi_field(model), 50, kSeed);
      if (!(std::abs(rep.lambda_xi - 2.0 * n) < 1e-8))
        return worse(detail, "lambda_xi n=" + std::to_string(n),
                     std::abs(rep.lambda_xi - 2.0 * n), 1e-8);
      if (rep.soliton_class != "expanding") {
        detail = "class(n=" + std::to_string(n) + ")=" + rep.soliton_class;
        return false;
      }
    }
    // Formula coverage: (2.11)-(2.13) on the 3-dim models (constant and
    // varying r), (2.15)-(2.16) on the Kenmotsu (f=1) models.
    struct Case {
      std::string label;
      Model model;
      std::vector<std::string> expect;
    };
    std::vector<Case> cases;
    cases.push_back({"beta=2 n=1", build_beta_kenmotsu(1, 2.0), {"eq_2_11", "eq_2_12", "eq_2_13"}});
    cases.push_back({"H3", build_beta_kenmotsu(1, 1.0),
                     {"eq_2_11", "eq_2_12", "eq_2_13", "eq_2_15", "eq_2_16"}});
    cases.push_back({"curved", build_beta_kenmotsu(1, 1.0, FiberSpec::constant_curvature(-1.0)),
                     {"eq_2_11", "eq_2_12", "eq_2_13"}});
    cases.push_back({"H5", build_beta_kenmotsu(2, 1.0), {"eq_2_15", "eq_2_16"}});
    cases.push_back({"f-family", build_f_kenmotsu(1, KenmotsuFunction::affine_exponential(1.0, 0.5, -1.0), {0.0, 1.0}),
                     {"eq_2_11"}});
    for (const auto& c : cases) {
      const auto rep = verify_alpha_formulas(c.model, 50, kSeed);
      for (const auto& key : c.expect) {
        auto it = rep.find(key);
        if (it == rep.end()) {
          detail = c.label + " missing " + key;
          return false;
        }
        if (!(it->second < 1e-8)) return worse(detail, c.label + " " + key, it->second, 1e-8);
      }
    }
    return true;
  });

  // 7. SWRS (Prop. 2) and Ricci-semisymmetry (Prop. 1) consistency.
  h.criterion(7, "SWRS rho ~ 0 and (2.8) < 1e-8; semisymmetry < 1e-9 with Einstein < 1e-8", [&](std::string& detail) {
    for (int n : {1, 2}) {
      auto model = build_beta_kenmotsu(n, 1.0);
      const auto sw = swrs_test(model, 50, kSeed);
      if (!(sw.rho_norm_max < 1e-8)) return worse(detail, "rho n=" + std::to_string(n), sw.rho_norm_max, 1e-8);
      if (!(sw.residual_max < 1e-8)) return worse(detail, "fit n=" + std::to_string(n), sw.residual_max, 1e-8);
      if (!(sw.eq_2_8_residual < 1e-8)) return worse(detail, "(2.8) n=" + std::to_string(n), sw.eq_2_8_residual, 1e-8);
      const auto ss = ricci_semisymmetry_test(model, 50, kSeed);
      if (!(ss.rs_residual_max < 1e-9)) return worse(detail, "R.S n=" + std::to_string(n), ss.rs_residual_max, 1e-9);
      if (!(ss.einstein_residual_max < 1e-8))
        return worse(detail, "Einstein n=" + std::to_string(n), ss.einstein_residual_max, 1e-8);
    }
    return true;
  });

  // 8. Dynamics: drift, 4th-order convergence, parallel tensors as QFIs,
  //    eta x eta failing the gate.
  h.criterion(8, "geodesics: drift < 1e-6; order factor >= 8; parallel QFIs; eta x eta fails", [&](std::string& detail) {
    std::vector<CatalogEntry> models = catalog;
    models.push_back({"flat", build_flat(3)});
    models.push_back({"H2xR", build_product_h2xr()});
    GeodesicOptions opts;
    opts.throw_on_coarse = false;
    for (const auto& [label, model] : models) {
      Rng rng(kSeed);
      const int m = model.m();
      for (int i = 0; i < 5; ++i) {
        const Point x0 = rng.point_in(model.chart);
        const auto tr = integrate_geodesic(model, x0, rng.unit_vector(m), 10.0, 1e-3, opts);
        if (!(tr.energy_drift < 1e-6))
          return worse(detail, label + " drift", tr.energy_drift, 1e-6);
      }
      // Convergence order.
      const Point x0 = model.center();
      const Eigen::VectorXd v0 = rng.unit_vector(m);
      const double d1 = integrate_geodesic(model, x0, v0, 5.0, 0.02, opts).energy_drift;
      const double d2 = integrate_geodesic(model, x0, v0, 5.0, 0.01, opts).energy_drift;
      if (d2 > 1e-15 && !(d1 / d2 >= 8.0)) {
        std::ostringstream os;
        os << label << " convergence factor " << d1 / d2;
        detail = os.str();
        return false;
      }
      // Every parallel basis tensor is a first integral.
      const auto rep = parallel_space(model, model.center(), 3, kSeed);
      for (int k = 0; k < rep.d; ++k) {
        const auto field = extend_parallel_tensor(model, rep.basepoint, rep.basis_tensor(k));
        const auto kt = killing_type_residual(model, field, 10, kSeed);
        if (!(kt.killing_residual < 1e-8))
          return worse(detail, label + " killing(3.1)", kt.killing_residual, 1e-8);
        if (!(kt.sqfi_residual < 1e-8))
          return worse(detail, label + " sqfi residual", kt.sqfi_residual, 1e-8);
        const auto tr = integrate_geodesic(model, rep.basepoint, rng.unit_vector(m), 5.0, 1e-3, opts);
        const double drift = qfi_drift(tr, field);
        if (!(drift < 1e-6)) return worse(detail, label + " parallel qfi drift", drift, 1e-6);
      }
      // eta x eta must fail the gate on contact models.
      if (model.has_contact()) {
        SymTensor2Field ee = SymTensor2Field::zero(m);
        ee.set(0, 0, ScalarExpr::constant(1.0));
        const auto kt = killing_type_residual(model, ee, 10, kSeed);
        if (!(kt.sqfi_residual > 1e-3))
          return worse(detail, label + " eta.eta sqfi gate (want > 1e-3)", kt.sqfi_residual, 1e-3);
        const auto tr = integrate_geodesic(model, model.center(), rng.unit_vector(m), 10.0, 1e-3, opts);
        const double drift = qfi_drift(tr, ee);
        if (!(drift > 1e-3))
          return worse(detail, label + " eta.eta drift gate (want > 1e-3)", drift, 1e-3);
      }
    }
    return true;
  });

  // 9. Oracle agreement: jets vs finite differences; constant-curvature
  //    closed form on H3.
  h.criterion(9, "jets vs FD < 1e-5 (orders 1-2); H3 curvature closed form < 1e-8", [&](std::string& detail) {
    for (const auto& [label, model] : catalog) {
      Rng rng(kSeed);
      const int m = model.m();
      std::vector<int> dirs(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) dirs[static_cast<std::size_t>(i)] = i;
      for (int s = 0; s < 100; ++s) {
        Point p = rng.point_in(model.chart);
        // Stay a step away from the box edge for the FD probes.
        for (int i = 0; i < m; ++i) {
          const auto& [lo, hi] = model.chart.box[static_cast<std::size_t>(i)];
          p[static_cast<std::size_t>(i)] = std::min(std::max(p[static_cast<std::size_t>(i)], lo + 1e-3), hi - 1e-3);
        }
        for (int i = 0; i < m; ++i)
          for (int j = i; j < m; ++j) {
            const double disc = fd_check(model.g.at(i, j), p, 1e-5, dirs);
            if (!(disc < 1e-5)) return worse(detail, label + " fd_check", disc, 1e-5);
          }
        if (model.fkf) {
          const double disc = fd_check(model.fkf->f, p, 1e-5, dirs);
          if (!(disc < 1e-5)) return worse(detail, label + " fd_check(f)", disc, 1e-5);
        }
      }
    }
    auto h3 = build_beta_kenmotsu(1, 1.0);
    Rng rng(kSeed);
    for (int s = 0; s < 20; ++s) {
      const Point p = rng.point_in(h3.chart);
      const CurvatureBundle b = riemann(h3.g, p);
      double dev = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) {
              const double expect = -(b.g(j, k) * b.g(i, l) - b.g(i, k) * b.g(j, l));
              dev = std::max(dev, std::abs(b.riem_low(i, j, k, l) - expect));
            }
      if (!(dev < 1e-8)) return worse(detail, "H3 closed form", dev, 1e-8);
    }
    return true;
  });

  // 10. Determinism: byte-identical reports for identical config and seed.
  h.criterion(10, "byte-identical JSON reports across two runs (same config, seed)", [&](std::string& detail) {
#ifdef FKGEO_CLI_PATH
    const std::string cfg_path = "/tmp/fkgeo_acceptance_cfg.json";
    {
      std::ofstream os(cfg_path);
      os << R"({"model":"beta_kenmotsu","n":1,"beta":1.0,"command":"all","seed":424242,"samples":25})";
    }
    auto run_once = [&](const std::string& out) {
      const std::string cmd = std::string(FKGEO_CLI_PATH) + " --config " + cfg_path +
                              " --out " + out + " 2>/dev/null";
      return std::system(cmd.c_str());
    };
    const int s1 = run_once("/tmp/fkgeo_acc_r1.json");
    const int s2 = run_once("/tmp/fkgeo_acc_r2.json");
    if (WEXITSTATUS(s1) != 0 || WEXITSTATUS(s2) != 0) {
      detail = "cli exit codes " + std::to_string(WEXITSTATUS(s1)) + "/" + std::to_string(WEXITSTATUS(s2));
      return false;
    }
    std::ifstream f1("/tmp/fkgeo_acc_r1.json"), f2("/tmp/fkgeo_acc_r2.json");
    const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    if (b1.empty() || b1 != b2) {
      detail = "reports differ or are empty";
      return false;
    }
    // Also byte-stable in-process for a second model.
    nlohmann::json j = {{"model", "flat"}, {"m", 3}, {"command", "sqfi"}, {"seed", 77}};
    const RunConfig cfg = parse_config(j);
    if (run(cfg).doc.dump(2) != run(cfg).doc.dump(2)) {
      detail = "in-process reports differ";
      return false;
    }
    return true;
#else
    detail = "cli path not wired";
    return false;
#endif
  });

  std::printf("%s: %d criterion(s) failed\n", h.failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              h.failures);
  return h.failures == 0 ? 0 : 1;
}
