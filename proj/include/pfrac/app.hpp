#pragma once

namespace pfrac {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_not_converged = 3;

void init_logging();

int run_cli(int argc, char** argv);

}  // namespace pfrac
