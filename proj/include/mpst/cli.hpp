#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace mpst {

// Runs the command-line driver. Exit codes: 0 success/coherent, 1
// incoherence or property violation, 2 usage or parse errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace mpst
