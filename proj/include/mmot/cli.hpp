#pragma once

#include <string>
#include <vector>

namespace mmot {

/// Entry point shared by the binary and the tests. Exit codes: 0 success,
/// 1 I/O or parse error (including bad usage), 2 validation or certification
/// failure, 3 construction failure or internal assertion.
int run_cli(const std::vector<std::string>& args);

}  // namespace mmot
