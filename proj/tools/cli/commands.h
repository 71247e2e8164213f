#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "cli/config.h"

namespace wncs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::string> mode;
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int64_t> trials;
  std::optional<int64_t> horizon;
};

void ApplyOverrides(const Overrides& ov, ExperimentConfig* cfg);

/// Each command writes its artifacts under cfg.output.directory, prints a
/// short summary to `out` and returns an exit code.
int CmdCertify(const ExperimentConfig& cfg, std::ostream& out);
int CmdFeasible(const ExperimentConfig& cfg, std::ostream& out);
int CmdOptimize(const ExperimentConfig& cfg, const Overrides& ov,
                std::ostream& out);
int CmdSimulate(const ExperimentConfig& cfg, std::ostream& out);
/// Built-in robot-arm configuration; figures 3 to 8.
int CmdReproduce(int figure, const Overrides& ov, std::ostream& out);

/// Full front end: argument parsing, dispatch and exception-to-exit-code
/// mapping.
int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace wncs::cli
