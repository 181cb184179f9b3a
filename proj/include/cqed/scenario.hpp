#ifndef CQED_SCENARIO_HPP
#define CQED_SCENARIO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "cqed/model.hpp"

namespace cqed {

inline constexpr const char* kToolkitVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

struct Scenario {
  std::string name;
  std::string figure;       ///< which reference figure the run reproduces
  std::string description;
  double budget_seconds = 0.0;
  std::string task;
  SystemParams params;
  nlohmann::json raw;       ///< full validated config
  std::string source_bytes; ///< original file content, for the manifest digest
};

/// Parse + validate a scenario file. validation_error messages carry the
/// JSON-pointer path of the offending field.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& content, const std::string& origin);

nlohmann::json params_to_json(const SystemParams& params);
SystemParams params_from_json(const nlohmann::json& j, const std::string& pointer);

struct RunOptions {
  std::string out_dir = ".";
  int threads = 1;
};

struct RunOutcome {
  std::vector<std::string> output_files;  ///< paths written, manifest last
  nlohmann::json metadata;
};

RunOutcome run_scenario(const Scenario& scenario, const RunOptions& options);

struct CatalogEntry {
  std::string file;
  std::string name;
  std::string figure;
  std::string description;
  double budget_seconds = 0.0;
};

/// All scenario files in a directory, parsed and validated, sorted by name.
std::vector<CatalogEntry> scenario_catalog(const std::string& dir);

}  // namespace cqed

#endif
