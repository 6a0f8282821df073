#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace jitvd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInternal = 3;

/// Runs the command line `args` (without the program name). Command output
/// goes to `out`; failures print {"error": kind, "message": ...} to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jitvd::cli
