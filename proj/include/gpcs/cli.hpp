#pragma once

namespace gpcs {

/// Entry point for the gpcs command-line tool (estimate / scan /
/// simulate / power subcommands). Returns the process exit code.
int cli_main(int argc, const char* const* argv);

}  // namespace gpcs
