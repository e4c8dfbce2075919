#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "regmod/io.hpp"

namespace regmod {

// Names accepted in a scenario's "audits" list, in registry order.
const std::vector<std::string>& audit_names();

// Runs one registered audit. Missing ids and bases fall back to the instance meta
// ("base", "window", "xbar"). A failed theorem hypothesis becomes not-applicable.
AuditReport run_audit(const Instance& inst, const std::string& audit, const Json& params);

struct RunOptions {
  std::optional<std::uint64_t> seed;            // overrides the scenario seed
  std::optional<std::filesystem::path> out_dir; // overrides the scenario's output dir
  bool timestamp = true;                        // add "generated_at" to written reports
};

struct AuditOutcome {
  std::string audit;
  Verdict expected = Verdict::pass;
  AuditReport report;
  [[nodiscard]] bool matched() const { return report.verdict == expected; }
};

struct ScenarioResult {
  std::string name;
  std::vector<AuditOutcome> outcomes;
  // 0 when every verdict matches its expectation, 1 otherwise.
  [[nodiscard]] int exit_code() const;
};

// Loads the instance named by a scenario: {"generator": {...}} or {"file": path},
// with relative paths taken from base_dir.
Instance scenario_instance(const Json& scenario, const std::filesystem::path& base_dir,
                           std::optional<std::uint64_t> seed = std::nullopt);

// Runs the audits in declaration order and writes one JSON report per audit plus
// summary.csv when an output directory is set. Input problems throw InputError.
ScenarioResult run_scenario(const Json& scenario, const std::filesystem::path& base_dir, const RunOptions& opt = {});

struct SweepRow {
  double param_value = 0.0;
  std::string audit;
  Json params;
  AuditReport report;
};

// Sets `parameter` to each value in every audit whose params carry that key.
// Throws InputError if no audit carries it.
std::vector<SweepRow> sweep(const Json& scenario, const std::filesystem::path& base_dir, const std::string& parameter,
                            const std::vector<double>& values, const RunOptions& opt = {});
std::string sweep_to_csv(const std::vector<SweepRow>& rows);
Json sweep_to_json(const std::vector<SweepRow>& rows);

// %.17g with "inf" / "-inf".
std::string format_number(double v);

}  // namespace regmod
