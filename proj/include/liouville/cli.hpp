#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace liouville::cli {

// Process exit codes.
inline constexpr int kOk = 0;
inline constexpr int kNegative = 1;          // validate: fails; flatness: not flat; generate: retries exhausted
inline constexpr int kConformalOnly = 2;     // verify
inline constexpr int kInconclusive = 2;      // flatness
inline constexpr int kInequivalent = 3;      // verify
inline constexpr int kInputError = 4;        // unreadable input, violated preconditions, usage errors

/// Runs one command; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace liouville::cli
