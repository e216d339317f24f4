#pragma once

#include <ostream>

namespace specbreak {

/**
 * Entry point of the `specbreak` tool (subcommands test, detect, simulate,
 * experiment). Returns 0 on success, 1 on runtime or numerical failures and 2
 * on usage, configuration or missing-file errors.
 */
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace specbreak
