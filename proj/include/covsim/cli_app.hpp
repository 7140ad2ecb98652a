#pragma once

namespace covsim::cliapp {

// Full command-line front end; returns the process exit code.
// 0 success, 1 failed validation checks, 2 invalid config,
// 3 infeasible parameters, 4 partial sweep failures.
int run(int argc, const char* const* argv);

}  // namespace covsim::cliapp
