#pragma once

#include <string>
#include <vector>

namespace rloco::cli {

// Exit codes: 0 success, 1 runtime failure, 2 invalid usage, and for CSV
// ingestion failures 3 (missing header), 4 (non-numeric cell), 5 (absent
// target column).
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCsvHeader = 3;
inline constexpr int kExitCsvCell = 4;
inline constexpr int kExitCsvTarget = 5;

// Parses argv-style arguments (without the program name) and dispatches the
// subcommand. Every command writes a manifest.json into the output directory
// sufficient to reproduce the run.
int run(const std::vector<std::string>& args);

}  // namespace rloco::cli
