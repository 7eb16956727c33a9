/**
 * @file cli.hpp
 * @brief Command-line front end: tune, simulate, doe, report.
 *
 * Exit codes: 0 success, 1 usage or I/O error, 2 infeasible result or
 * failed acceptance. The default output directory comes from
 * FRACBENCH_OUTDIR when set.
 */
#pragma once

#include <string>
#include <vector>

namespace fracbench {

inline constexpr const char* kVersion = "0.1.0";

int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

} // namespace fracbench
