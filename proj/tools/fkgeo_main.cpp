// Configuration-driven batch runner: builds the requested coordinate model,
// executes the named verification command, and emits a machine-readable
// report (byte-stable for a fixed config and seed).

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fkgeo/errors.hpp"
#include "fkgeo/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fkgeo: numerical verification of f-Kenmotsu geometry"};

  std::string config_path;
  std::string command, format, out_path;
  std::uint64_t seed = 0;
  int samples = 0;
  bool have_seed = false, have_samples = false;

  app.add_option("--config", config_path, "path to a JSON run configuration")
      ->required();
  app.add_option("--command", command, "override the config's command");
  app.add_option("--seed", seed, "override the config's seed")
      ->each([&](const std::string&) { have_seed = true; });
  app.add_option("--samples", samples, "override the config's sample count")
      ->each([&](const std::string&) { have_samples = true; });
  app.add_option("--format", format, "json | text (overrides config)");
  app.add_option("--out", out_path, "report output path (overrides config)");

  CLI11_PARSE(app, argc, argv);

  const auto t0 = std::chrono::steady_clock::now();
  try {
    std::ifstream in(config_path);
    if (!in) throw fkgeo::ConfigError("cannot open config file: " + config_path);
    nlohmann::json raw = nlohmann::json::parse(in);

    if (!command.empty()) raw["command"] = command;
    if (have_seed) raw["seed"] = seed;
    if (have_samples) raw["samples"] = samples;
    if (!format.empty()) raw["format"] = format;
    if (!out_path.empty()) raw["out"] = out_path;

    const fkgeo::RunConfig cfg = fkgeo::parse_config(raw);
    const fkgeo::RunReport report = fkgeo::run(cfg);

    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    const std::string body = cfg.format == "text"
                                 ? fkgeo::render_text(report.doc, wall_ms)
                                 : report.doc.dump(2) + "\n";
    if (!cfg.out.empty()) {
      std::ofstream os(cfg.out, std::ios::binary);
      if (!os) throw fkgeo::ConfigError("cannot open output file: " + cfg.out);
      os << body;
    } else {
      std::cout << body;
    }
    return report.exit_code;
  } catch (const fkgeo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const fkgeo::InvalidParam& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
