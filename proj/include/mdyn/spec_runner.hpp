#ifndef MDYN_SPEC_RUNNER_HPP
#define MDYN_SPEC_RUNNER_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdyn/graph.hpp"

namespace mdyn {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kCsvSchema = "mdyn-csv v1";

/// Experiment kinds accepted by run_spec (and the CLI subcommands).
const std::vector<std::string>& experiment_kinds();

/// Every violated field of a spec, reported together.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> problems);
  [[nodiscard]] const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Declarative experiment description.
///
/// Parsed from JSON of the form
///   {"kind": "...", "graph": {"type": "torus", "side": 10, "dim": 2},
///    "rule": "median", "horizon": 5, "replicas": 100, "seed": 1,
///    "params": {...}, "output": {"prefix": "..."}}
/// Missing fields take per-kind defaults; see README for the full list.
struct ExperimentSpec {
  std::string kind;
  nlohmann::json graph;
  std::string rule;
  double horizon = 0.0;
  std::size_t replicas = 0;
  std::uint64_t seed = 0;
  nlohmann::json params;
  std::string prefix;

  /// Applies per-kind defaults to `j` and validates the result. Throws
  /// ValidationError listing every problem.
  static ExperimentSpec from_json(const nlohmann::json& j);
  [[nodiscard]] nlohmann::json to_json() const;
  /// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
  [[nodiscard]] std::string hash() const;
};

/// Builds the graph described by a spec's "graph" object.
Graph build_graph(const nlohmann::json& desc);

struct RunOutcome {
  /// False when a checked property failed (CLI exit code 2).
  bool pass = true;
  std::vector<std::filesystem::path> files;
  nlohmann::json summary;
};

/// Executes the harness named by spec.kind, writing <prefix>.csv,
/// <prefix>.json and any snapshot images into out_dir.
RunOutcome run_spec(const ExperimentSpec& spec, const std::filesystem::path& out_dir);

}  // namespace mdyn

#endif  // MDYN_SPEC_RUNNER_HPP
