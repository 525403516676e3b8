#pragma once

namespace mfg {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNoConvergence = 2;

/// Subcommands solve-hjb, solve-aiyagari, solve-huggett, solve-transition,
/// simulate and validate. Returns 0 on success, 1 on invalid input and 2 when
/// a solver does not converge (the iteration trace goes to stderr and to
/// <out>/trace.csv).
int cli_main(int argc, const char* const* argv);

}  // namespace mfg
