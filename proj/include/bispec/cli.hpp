#pragma once

namespace bispec {

/// Entry point of the `bispec` tool. Exit codes: 0 success, 1 validation
/// error or bad usage, 2 numerical failure.
int run(int argc, char** argv);

}  // namespace bispec
