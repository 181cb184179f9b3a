#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "cqed/scenario.hpp"
#include "cqed/threadpool.hpp"
#include "cqed/types.hpp"

namespace {

int cmd_run(const std::string& file, const std::string& out_dir, int threads) {
  const cqed::Scenario sc = cqed::load_scenario(file);
  cqed::RunOptions options;
  options.out_dir = out_dir;
  options.threads = threads;
  const cqed::RunOutcome outcome = cqed::run_scenario(sc, options);
  for (const auto& f : outcome.output_files) {
    std::printf("wrote %s\n", f.c_str());
  }
  return 0;
}

int cmd_list(const std::string& dir) {
  const auto catalog = cqed::scenario_catalog(dir);
  std::printf("%-28s %-8s %-10s %s\n", "name", "figure", "budget", "description");
  for (const auto& entry : catalog) {
    char budget[32];
    std::snprintf(budget, sizeof(budget), "%.0fs", entry.budget_seconds);
    std::printf("%-28s %-8s %-10s %s\n", entry.name.c_str(),
                entry.figure.empty() ? "-" : entry.figure.c_str(), budget,
                entry.description.c_str());
  }
  return 0;
}

int cmd_validate(const std::string& file) {
  const cqed::Scenario sc = cqed::load_scenario(file);
  std::printf("%s: valid (task %s)\n", sc.name.c_str(), sc.task.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cascade_qed: cascaded two-photon emission simulator for a "
               "three-level ladder emitter coupled to two lossy cavities"};
  app.require_subcommand(1);

  std::string file, out_dir = ".", dir = "scenarios";
  int threads = cqed::default_thread_count();

  auto* run = app.add_subcommand("run", "run a scenario file and write its artifacts");
  run->add_option("file", file, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory (default: current)");
  run->add_option("--threads", threads,
                  "sweep concurrency cap (default: CASCADE_QED_THREADS or hardware)");

  auto* list = app.add_subcommand("list", "list the shipped scenario catalog");
  list->add_option("--dir", dir, "scenario directory (default: scenarios)");

  auto* validate = app.add_subcommand("validate", "validate a scenario file");
  validate->add_option("file", file, "scenario JSON file")->required();

  try {
    app.parse(argc, argv);
    if (run->parsed()) return cmd_run(file, out_dir, threads);
    if (list->parsed()) return cmd_list(dir);
    if (validate->parsed()) return cmd_validate(file);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const cqed::validation_error& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 1;
  } catch (const cqed::numerical_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
