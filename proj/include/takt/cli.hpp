#pragma once

namespace takt {

// Command-line front end. Exit codes: 0 success, 2 infeasible or invalid
// input, 3 internal error. Set TT_LOG=1 for progress on stderr.
int run_cli(int argc, char** argv);

}  // namespace takt
