// cli.hpp: command-line entry point
//
//   triwell <evolve|spectrum|manifold|chargemap|curve|lzmodel|analytic2> [options]
//
// Exit codes: 0 success, 2 usage error, 3 solver or analysis error.

#pragma once

#include <iosfwd>

namespace triwell::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolver = 3;

// Results go to --out (or `out` when --out is "-"); diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace triwell::cli
