#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fkgeo/model.hpp"

namespace fkgeo {

inline constexpr const char* kToolVersion = "0.1.0";

// Validated run configuration. Unknown keys are rejected; the seed is
// mandatory so every report is reproducible.
struct RunConfig {
  std::string model;
  int n = 1;
  double beta = 1.0;
  std::string fiber = "flat";
  double k = -1.0;
  std::optional<KenmotsuFunction> f;
  std::pair<double, double> t_interval{0.0, 1.0};
  int m = 3;

  std::string command;
  int samples = 100;
  std::uint64_t seed = 0;
  std::string V = "xi";
  std::string X = "rotation";
  std::vector<std::string> V_exprs, X_exprs;
  std::map<std::string, double> tolerances;
  std::string format = "json";
  std::string out;

  nlohmann::json echo;  // normalized configuration for the report
};

RunConfig parse_config(const nlohmann::json& j);

// Infix expression grammar for config files: numbers, coordinates
// (t, x1, x2, ...), + - * /, integer ^, exp(), ln(), tanh(), parentheses.
ExprPtr parse_expression(const std::string& src,
                         const std::vector<std::string>& coord_names);

// Identify the warp family of an arbitrary f(t) expression by probing its
// jets, then verify the reconstruction across the interval. Throws
// ConfigError when the expression is not one of the supported families.
KenmotsuFunction match_f_family(const ExprPtr& f, std::pair<double, double> t_interval);

Model build_model(const RunConfig& cfg);

struct RunReport {
  nlohmann::json doc;
  int exit_code = 0;  // 0 pass, 1 check failure, 2 config error, 3 numerical error
};

RunReport run(const RunConfig& cfg);

std::string render_text(const nlohmann::json& report, double wall_ms);

}  // namespace fkgeo
