#pragma once

namespace psomle::cli {

/// Entry point of the psomle command. Returns 0 on success, 2 for usage
/// errors (bad flags, unknown model or data, invalid configuration) and 1
/// when the workflow fails at run time.
int run(int argc, char** argv);

}  // namespace psomle::cli
