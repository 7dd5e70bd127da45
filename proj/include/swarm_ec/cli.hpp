#pragma once

#include <iosfwd>

namespace swarm_ec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRetrievalFailure = 1;
inline constexpr int kExitUsage = 2;

// Subcommands: plan, tables, encode, decode, replicate, simulate.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace swarm_ec::cli
