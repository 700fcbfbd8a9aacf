// Copyright 2026 The Credence Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: fit, predict, project, simulate, serve.
// Exit codes: 0 success, 1 numerical failure, 2 input error.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace credence {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitInput = 2;

/// Runs one command; args exclude the program name. Output and diagnostics
/// go to the given streams, so the CLI can be driven in-process.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace credence
