#pragma once

namespace delfi::cli {

// Exit codes: 0 accept/success, 3 reject, 4 degenerate selection, 1 error.
inline constexpr int kExitAccept = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitReject = 3;
inline constexpr int kExitDegenerate = 4;

int run(int argc, const char* const* argv);

}  // namespace delfi::cli
