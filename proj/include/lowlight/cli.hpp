#pragma once

namespace lowlight {

/// Entry point behind the `lowlight` binary. Exit codes: 0 success,
/// 1 usage/input error, 2 I/O or format error, 3 numerical failure.
int run_cli(int argc, const char* const* argv);

}  // namespace lowlight
