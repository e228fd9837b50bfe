#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

#include "fkgeo/runner.hpp"

using namespace fkgeo;
using nlohmann::json;

TEST_CASE("expression grammar") {
  const std::vector<std::string> coords{"t", "x1", "x2"};
  SUBCASE("precedence and values") {
    auto e = parse_expression("1 + 2*t^2 - x1/4", coords);
    CHECK(eval_value(e, Point{3.0, 8.0, 0.0}) == doctest::Approx(1 + 18 - 2));
  }
  SUBCASE("functions and nesting") {
    auto e = parse_expression("exp(-t) * (1 + tanh(x1))", coords);
    CHECK(eval_value(e, Point{0.0, 0.0, 0.0}) == doctest::Approx(1.0));
    auto l = parse_expression("ln(t + 2)", coords);
    CHECK(eval_value(l, Point{-1.0, 0.0, 0.0}) == doctest::Approx(0.0));
  }
  SUBCASE("unary minus and negative exponent") {
    auto e = parse_expression("-t^2", coords);
    CHECK(eval_value(e, Point{3.0, 0.0, 0.0}) == doctest::Approx(-9.0));
    auto r = parse_expression("(t+2)^-1", coords);
    CHECK(eval_value(r, Point{0.0, 0.0, 0.0}) == doctest::Approx(0.5));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS((void)parse_expression("t +", coords), ConfigError);
    CHECK_THROWS_AS((void)parse_expression("sin(t)", coords), ConfigError);
    CHECK_THROWS_AS((void)parse_expression("t ^ x1", coords), ConfigError);
    CHECK_THROWS_AS((void)parse_expression("y9", coords), ConfigError);
    CHECK_THROWS_AS((void)parse_expression("(t", coords), ConfigError);
  }
}

TEST_CASE("f-family matching from expression strings") {
  const std::vector<std::string> tc{"t"};
  SUBCASE("constant") {
    auto kf = match_f_family(parse_expression("2.5", tc), {0.0, 1.0});
    CHECK(kf.family == FFamily::Constant);
    CHECK(kf.beta == doctest::Approx(2.5));
  }
  SUBCASE("affine exponential") {
    auto kf = match_f_family(parse_expression("1 + 0.5*exp(-t)", tc), {0.0, 1.0});
    CHECK(kf.family == FFamily::AffineExponential);
    CHECK(kf.a == doctest::Approx(1.0));
    CHECK(kf.b == doctest::Approx(0.5));
    CHECK(kf.c == doctest::Approx(-1.0));
  }
  SUBCASE("pure exponential") {
    auto kf = match_f_family(parse_expression("0.3*exp(2*t)", tc), {0.0, 1.0});
    CHECK(kf.family == FFamily::Exponential);
    CHECK(kf.a == doctest::Approx(0.3));
    CHECK(kf.c == doctest::Approx(2.0));
  }
  SUBCASE("reciprocal") {
    auto kf = match_f_family(parse_expression("1/(t+2)", tc), {0.0, 1.0});
    CHECK(kf.family == FFamily::Reciprocal);
    CHECK(kf.t0 == doctest::Approx(2.0));
  }
  SUBCASE("unsupported shape is rejected") {
    CHECK_THROWS_AS((void)match_f_family(parse_expression("1 + t^2", tc), {0.0, 1.0}),
                    ConfigError);
    CHECK_THROWS_AS((void)match_f_family(parse_expression("tanh(t)+2", tc), {0.0, 1.0}),
                    ConfigError);
  }
}

TEST_CASE("config validation") {
  json base = {{"model", "beta_kenmotsu"}, {"n", 1},      {"beta", 1.0},
               {"command", "parallel-dim"}, {"seed", 42}};
  CHECK_NOTHROW((void)parse_config(base));

  SUBCASE("seed is mandatory") {
    json j = base;
    j.erase("seed");
    CHECK_THROWS_AS((void)parse_config(j), ConfigError);
  }
  SUBCASE("unknown keys rejected") {
    json j = base;
    j["betaa"] = 2.0;
    CHECK_THROWS_AS((void)parse_config(j), ConfigError);
  }
  SUBCASE("inapplicable keys rejected") {
    json j = base;
    j["m"] = 3;  // only valid for the flat model
    CHECK_THROWS_AS((void)parse_config(j), ConfigError);
    json f = {{"model", "flat"}, {"m", 3}, {"beta", 1.0}, {"command", "sqfi"}, {"seed", 1}};
    CHECK_THROWS_AS((void)parse_config(f), ConfigError);
  }
  SUBCASE("tolerances must be positive") {
    json j = base;
    j["tolerances"] = {{"inv_gap_ratio", -1.0}};
    CHECK_THROWS_AS((void)parse_config(j), ConfigError);
    j["tolerances"] = {{"inv_gap_ratio", 1e-3}};
    CHECK_NOTHROW((void)parse_config(j));
  }
  SUBCASE("unknown command / model") {
    json j = base;
    j["command"] = "fly";
    CHECK_THROWS_AS((void)parse_config(j), ConfigError);
    json k = base;
    k["model"] = "torus";
    CHECK_THROWS_AS((void)parse_config(k), ConfigError);
  }
  SUBCASE("curved fiber needs k; k rejected on flat fiber") {
    json j = base;
    j["fiber"] = "curved";
    CHECK_THROWS_AS((void)parse_config(j), ConfigError);
    j["k"] = -1.0;
    CHECK_NOTHROW((void)parse_config(j));
    json k2 = base;
    k2["k"] = -1.0;
    CHECK_THROWS_AS((void)parse_config(k2), ConfigError);
  }
  SUBCASE("V / X specs") {
    json j = base;
    j["V"] = "xi";
    CHECK_NOTHROW((void)parse_config(j));
    j["V"] = "sideways";
    CHECK_THROWS_AS((void)parse_config(j), ConfigError);
    j["V"] = json::array({"0", "x1", "-x2"});
    CHECK_NOTHROW((void)parse_config(j));
  }
}

TEST_CASE("in-process run: report structure and determinism") {
  json j = {{"model", "beta_kenmotsu"}, {"n", 1},    {"beta", 1.0},
            {"command", "verify-structure"}, {"seed", 7}, {"samples", 20}};
  const RunConfig cfg = parse_config(j);
  const RunReport r1 = run(cfg);
  CHECK(r1.exit_code == 0);
  CHECK(r1.doc.at("status") == "pass");
  CHECK(r1.doc.at("version") == std::string(kToolVersion));
  CHECK(r1.doc.at("checks").contains("axiom_a"));
  CHECK(r1.doc.at("checks").at("axiom_f").at("pass").get<bool>());

  const RunReport r2 = run(cfg);
  CHECK(r1.doc.dump(2) == r2.doc.dump(2));
}

TEST_CASE("tolerance overrides can force a failure") {
  // eq_1_5 runs through the full curvature pipeline, so its residual is
  // nonzero rounding; an absurd tolerance must flip it to a failure.
  json j = {{"model", "beta_kenmotsu"},
            {"n", 1},
            {"beta", 1.0},
            {"command", "verify-identities"},
            {"seed", 7},
            {"samples", 10},
            {"tolerances", {{"eq_1_5", 1e-300}}}};
  const RunReport r = run(parse_config(j));
  CHECK(r.exit_code == 1);
  CHECK(r.doc.at("status") == "fail");
  CHECK_FALSE(r.doc.at("checks").at("eq_1_5").at("pass").get<bool>());
}

TEST_CASE("soliton command carries the paper's expected scalars") {
  json j = {{"model", "beta_kenmotsu"}, {"n", 2},      {"beta", 1.0},
            {"command", "soliton"},      {"seed", 11}, {"samples", 15},
            {"V", "xi"}};
  const RunReport r = run(parse_config(j));
  CHECK(r.exit_code == 0);
  CHECK(r.doc.at("results").at("lambda_xi").get<double>() == doctest::Approx(4.0));
  CHECK(r.doc.at("results").at("class") == "expanding");
  CHECK(r.doc.at("checks").at("eq_2_15").at("pass").get<bool>());
}

#ifdef FKGEO_CLI_PATH
TEST_CASE("command-line binary: exit codes and byte-stable output") {
  auto run_cli = [](const std::string& config_body, const std::string& extra,
                    std::string* out = nullptr) {
    const std::string cfg_path = "/tmp/fkgeo_test_cfg.json";
    {
      std::ofstream os(cfg_path);
      os << config_body;
    }
    const std::string out_path = "/tmp/fkgeo_test_out.json";
    const std::string cmd = std::string(FKGEO_CLI_PATH) + " --config " + cfg_path +
                            " " + extra + " > " + out_path + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    if (out) {
      std::ifstream is(out_path);
      out->assign(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
    }
    return WEXITSTATUS(status);
  };

  SUBCASE("pass -> exit 0") {
    std::string body;
    CHECK(run_cli(R"({"model":"flat","m":3,"command":"sqfi","seed":1})", "", &body) == 0);
    const json rep = json::parse(body);
    CHECK(rep.at("results").at("count") == 6);
  }
  SUBCASE("config error -> exit 2") {
    CHECK(run_cli(R"({"model":"flat","m":3,"command":"sqfi"})", "") == 2);
    CHECK(run_cli(R"(not json)", "") == 2);
  }
  SUBCASE("module error -> exit 3") {
    CHECK(run_cli(R"({"model":"flat","m":3,"command":"swrs","seed":1})", "") == 3);
  }
  SUBCASE("flag overrides") {
    std::string body;
    CHECK(run_cli(R"({"model":"flat","m":3,"command":"swrs","seed":1})",
                  "--command sqfi", &body) == 0);
    CHECK(json::parse(body).at("command") == "sqfi");
  }
  SUBCASE("two identical runs give identical bytes") {
    std::string b1, b2;
    run_cli(R"({"model":"beta_kenmotsu","n":1,"beta":0.5,"command":"eta-einstein","seed":3,"samples":15})",
            "", &b1);
    run_cli(R"({"model":"beta_kenmotsu","n":1,"beta":0.5,"command":"eta-einstein","seed":3,"samples":15})",
            "", &b2);
    CHECK(b1 == b2);
    CHECK_FALSE(b1.empty());
  }
}
#endif
