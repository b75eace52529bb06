#pragma once

#include <ostream>

#include "latflow/flow.hpp"
#include "latflow/report.hpp"

namespace latflow::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kBudget = 3, kPrecision = 4 };

/// Resolves "auto": rational when every listed literal is exact, else
/// bigfloat:256.
ModeSpec resolve_mode(const RunConfig& config, bool with_interval = true);
LineSegmentSpec make_line(const RunConfig& config);

Report classify(const RunConfig& config);
Report orbit(const RunConfig& config);
Report density(const RunConfig& config);
Report equidist(const RunConfig& config);
Report dirichlet(const RunConfig& config);
/// Dispatches on config.command.
Report run(const RunConfig& config);

/// Parses argv, runs, writes the outputs and maps errors to exit codes.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace latflow::cli
