#pragma once

#include <iosfwd>

#include "vessel/study/config.hpp"
#include "vessel/study/report.hpp"

namespace vessel::study {

enum ExitCode : int { kOk = 0, kInputError = 2, kNumericalError = 3, kNegativeResult = 4 };

/// Runs the engines for the configured study. Library errors propagate.
Report compute_study(const StudyConfig& cfg);

/// Full CLI: parses argv, runs, writes artifacts, maps errors to exit codes.
int run_study(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_study(int argc, const char* const* argv);

}  // namespace vessel::study
