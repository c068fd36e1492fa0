#pragma once

namespace aal::cli {

enum ExitCode : int {
    ok = 0,
    internal_error = 1,
    usage_error = 2,
    config_error = 3,
    no_common_mode = 4,
    no_feasible_mode = 5,
    dlm_failed = 6,
    verification_failed = 7,
    self_check_failed = 8,
};

int run(int argc, char** argv);

}  // namespace aal::cli
