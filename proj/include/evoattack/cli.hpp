#pragma once

namespace evoattack {

// Full command-line entry point. Returns the process exit code:
// 0 success, 1 domain error (shortfall, failed precondition, bad files),
// 2 usage error.
int run_cli(int argc, const char* const* argv);

}  // namespace evoattack
