#pragma once

#include <iosfwd>

namespace wdro {

inline constexpr const char* kToolVersion = "0.1.0";

/// The `wdro` command-line tool: train, eval, cv, bench, synth, runtime,
/// stylized. `--config FILE` reads TOML: the settings of a command sit under
/// its `[train]`, `[bench]`, ... table, keys are the long flag names, unknown
/// keys are an error, and flags given on the command line win.
///
/// Exit codes: 0 success, 1 usage, configuration or data error, 2 solver or
/// training failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wdro
