#pragma once

#include <ostream>

namespace swapfit {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNotBidirectional = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitFitFailure = 3;

// `swapfit fit|precheck|gof|timeline|synth ...`
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace swapfit
