#pragma once

// The five scenario commands behind the symlorentz executable. Each writes
// <out>/<command>_report.json plus its data files and returns an exit code.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

namespace symlorentz {

enum ExitCode : int {
  kExitPass = 0,
  kExitToleranceBreach = 1,
  kExitConfigError = 2,
  kExitDomainError = 3,
};

struct CommandOptions {
  std::filesystem::path scenario;
  std::filesystem::path out = "symlorentz_out";
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
};

/// command is one of classify, verify, simulate, trace, flow. Progress and
/// summaries go to `out`, diagnostics to `err`.
int run_command(std::string_view command, const CommandOptions& opts, std::ostream& out,
                std::ostream& err);

}  // namespace symlorentz
