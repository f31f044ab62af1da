#pragma once

namespace incompat {

/// `incompat <check|solve|homogenize|gconv|study> --config path [--out dir] [--threads n]`.
/// Returns 0 when every declared invariant passes, 1 on configuration errors,
/// 2 on invariant violations and 3 on solver failures; errors are also printed
/// as JSON on stderr and written to <out>/error.json when possible.
int run_command(int argc, char** argv);

}  // namespace incompat
