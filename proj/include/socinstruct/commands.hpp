#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "socinstruct/config.hpp"
#include "socinstruct/corpus.hpp"
#include "socinstruct/fixtures.hpp"
#include "socinstruct/report.hpp"

namespace socinstruct {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidationFailed = 1,
  kExitInputError = 2,
  kExitBackendError = 3,
  kExitAlignmentError = 4,
};

int cmd_tasks(const std::vector<std::string>& selection, std::ostream& out, std::ostream& err,
              const Registry& registry = Registry::builtin());

// Compile then validate; 0 only when validation finds nothing.
int cmd_compile(const CompileConfig& cfg, std::ostream& out, std::ostream& err,
                const Registry& registry = Registry::builtin());

int cmd_validate(const std::filesystem::path& corpus_dir, const ValidateOptions& options,
                 std::ostream& out, std::ostream& err,
                 const Registry& registry = Registry::builtin());

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err,
             const Registry& registry = Registry::builtin());

// Reads report.json and predictions.jsonl from both run directories and
// writes compare.json and compare.md into out_dir (default: run_a).
int cmd_compare(const std::filesystem::path& run_a, const std::filesystem::path& run_b,
                const CompareOptions& options,
                const std::optional<std::filesystem::path>& out_dir, std::ostream& out,
                std::ostream& err, const Registry& registry = Registry::builtin());

// Renders the report.json of each run directory into one table.
int cmd_report(const std::vector<std::filesystem::path>& runs, ReportFormat format,
               const std::optional<std::filesystem::path>& out_path, std::ostream& out,
               std::ostream& err, const Registry& registry = Registry::builtin());

int cmd_fixtures(const std::filesystem::path& out_dir, const FixtureOptions& options,
                 std::ostream& out, std::ostream& err,
                 const Registry& registry = Registry::builtin());

}  // namespace socinstruct
