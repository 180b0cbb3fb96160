#pragma once

#include <iosfwd>

namespace bht {

/// Entry point of the `bht` tool. Exit codes: 0 success, 1 invalid input or configuration,
/// 2 runtime or solver failure. Progress goes to `log`; results go only to the --out file.
int cli_main(int argc, const char* const* argv, std::ostream& log);

}  // namespace bht
