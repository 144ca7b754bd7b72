#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rscat {

inline constexpr const char* kVersion = "1.0.0";

/// Runs one subcommand (synth, sweep, recover-source, recover-potential,
/// nearfield, validate, diagnose-ergodic). args[0] is the program name.
/// Returns 0 on success, 1 on numeric failure, 2 on configuration error.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rscat
