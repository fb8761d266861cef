#pragma once

namespace converter::cli {

/// Entry point for the `converter` binary. Exit codes: 0 success,
/// 1 operational error, 2 usage error.
int run(int argc, const char* const* argv);

}  // namespace converter::cli
