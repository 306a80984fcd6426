#pragma once

namespace thermalrabi {

// argv-style entry point shared by the binary and the tests. Returns the
// process exit code: 0 success, 1 computation failure, 2 bad usage or
// config.
int run_cli(int argc, const char* const* argv);

}  // namespace thermalrabi
