// mdyn: run a median/majority dynamics experiment from a JSON spec.
//
//   mdyn <kind> [--spec file.json] [--seed N] [--replicas N] [--out-dir DIR]
//
// Exit codes: 0 success, 1 invalid spec or usage, 2 a checked property failed.

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "mdyn/spec_runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Median and majority dynamics experiments"};
  app.set_version_flag("--version", std::string(mdyn::kVersion));
  app.require_subcommand(1);

  std::string spec_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicas;
  std::string out_dir = "out";

  for (const auto& kind : mdyn::experiment_kinds()) {
    auto* sub = app.add_subcommand(kind, "Run the " + kind + " experiment");
    sub->add_option("--spec", spec_path, "JSON spec file (fields not given take defaults)")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override the spec seed");
    sub->add_option("--replicas", replicas, "Override the replica count");
    sub->add_option("--out-dir", out_dir, "Directory for CSV, JSON and image output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string kind = app.get_subcommands().front()->get_name();
  try {
    nlohmann::json j = nlohmann::json::object();
    if (!spec_path.empty()) {
      std::ifstream in(spec_path);
      j = nlohmann::json::parse(in);
      if (!j.is_object()) throw mdyn::ValidationError({"spec: must be a JSON object"});
      if (j.contains("kind") && j["kind"] != kind) {
        throw mdyn::ValidationError({"kind: spec says '" + j["kind"].dump() + "' but subcommand is '" + kind + "'"});
      }
    }
    j["kind"] = kind;
    if (seed) j["seed"] = *seed;
    if (replicas) j["replicas"] = *replicas;

    const auto spec = mdyn::ExperimentSpec::from_json(j);
    const auto outcome = mdyn::run_spec(spec, out_dir);
    for (const auto& f : outcome.files) std::cout << f.string() << '\n';
    if (!outcome.pass) {
      std::cerr << "mdyn: property check failed; see " << (out_dir + "/" + spec.prefix + ".json") << '\n';
      return 2;
    }
    return 0;
  } catch (const mdyn::ValidationError& e) {
    std::cerr << "mdyn: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "mdyn: invalid JSON: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "mdyn: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "mdyn: error: " << e.what() << '\n';
    return 1;
  }
}
