#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlab/cli/config.hpp"
#include "hlab/report.hpp"

namespace hlab::cli {

// Exit codes, disjoint.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;          // bad arguments, malformed config, unwritable output
inline constexpr int kExitNonConforming = 2;  // config violates the scheme assumptions
inline constexpr int kExitDivergence = 3;     // the run hit the divergence guard
inline constexpr int kExitDiagnostic = 4;     // at least one check failed

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Overrides {
  std::optional<std::size_t> horizon;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  bool force = false;
};

void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

/// Every assumption check for the configured scheme.
ReportSet validate_experiment(const ExperimentConfig& cfg);

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"thm21", "thm42", "thm411", "corollary413", "all"};
  return names;
}

/// Runs the named suite on a finished run. Throws UsageError for an unknown
/// suite, one that does not apply to the scheme, or an unknown check name.
ReportSet run_suite(const ExperimentConfig& cfg, const RunResult& run, const std::string& suite);

int cmd_validate(const std::filesystem::path& config, const Overrides& o, std::ostream& out, std::ostream& err);
int cmd_run(const std::filesystem::path& config, const Overrides& o, std::ostream& out, std::ostream& err);
int cmd_check(const std::filesystem::path& config, const std::string& suite, const Overrides& o, std::ostream& out,
              std::ostream& err);

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hlab::cli
