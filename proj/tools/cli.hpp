#pragma once

#include <iosfwd>

namespace ergodiff::cli
{

inline constexpr const char *tool_version = "0.1.0";

// Parses argv, runs one subcommand and writes its report to out.
// Returns 0 on success, 2 when the answer is indeterminate (precision,
// enumeration cap or search bound exhausted), 1 on usage or internal errors.
int dispatch(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace ergodiff::cli
