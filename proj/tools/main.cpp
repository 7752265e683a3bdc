// Command-line front end: parses flags, assembles the effective config, and
// maps failures onto the documented exit codes.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rkl/cli_run.hpp"
#include "rkl/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Radial kernel learning toolkit"};
  app.get_formatter()->column_width(28);

  std::string command;
  std::string configPath;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  std::string outDir;
  double lambda = 0.0;

  app.add_option("command", command, "One of: train-kernel, features, lsh-build, lsh-query, "
                                     "mmd-test, pde-simulate, svm, kmeans-label, synth-data")
      ->required();
  app.add_option("--config", configPath, "JSON config file merged over the defaults");
  app.add_option("--set", overrides, "key=value override with dotted paths")->type_size(1);
  auto* seedOpt = app.add_option("--seed", seed, "Root seed for every stream");
  auto* outOpt = app.add_option("--out", outDir, "Artifact directory");
  auto* lambdaOpt = app.add_option("--lambda", lambda, "Shortcut for the generator lambda");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : rkl::ConfigError::exitCode;
  }

  try {
    nlohmann::json user = nlohmann::json::object();
    if (!configPath.empty()) {
      std::ifstream in(configPath);
      if (!in) throw rkl::ConfigError("cannot open config file " + configPath);
      user = nlohmann::json::parse(in, nullptr, false);
      if (user.is_discarded()) throw rkl::ConfigError(configPath + " is not valid JSON");
    }
    const nlohmann::json defaults = rkl::default_config(command);
    rkl::validate_config(user, defaults);
    nlohmann::json merged = rkl::merge_config(defaults, user);
    for (const std::string& assignment : overrides) rkl::apply_override(merged, assignment);
    if (seedOpt->count() > 0) merged["seed"] = seed;
    if (outOpt->count() > 0) merged["out"] = outDir;
    if (lambdaOpt->count() > 0) {
      if (!merged.contains("lambda")) {
        throw rkl::ConfigError("--lambda is not supported by '" + command + "'");
      }
      merged["lambda"] = lambda;
    }

    const nlohmann::json summary = rkl::run_command(command, merged);
    std::cout << summary.dump(2) << std::endl;
    return 0;
  } catch (const rkl::ConfigError& e) {
    std::cerr << command << ": config error: " << e.what() << "\n";
    return rkl::ConfigError::exitCode;
  } catch (const rkl::DataError& e) {
    std::cerr << command << ": data error: " << e.what() << "\n";
    return rkl::DataError::exitCode;
  } catch (const rkl::NumericError& e) {
    std::cerr << command << ": numeric error: " << e.what() << "\n";
    return rkl::NumericError::exitCode;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << command << ": config error: " << e.what() << "\n";
    return rkl::ConfigError::exitCode;
  } catch (const std::exception& e) {
    std::cerr << command << ": error: " << e.what() << "\n";
    return 1;
  }
}
