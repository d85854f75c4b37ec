#pragma once

namespace dynsvd {

/// Full command-line front end (subcommands: run, gen, bench, profile).
/// Exit codes: 0 ok, 1 usage error, 2 data error, 3 numerical failure.
int cli_main(int argc, const char* const* argv);

}  // namespace dynsvd
