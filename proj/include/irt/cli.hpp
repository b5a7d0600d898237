// Copyright 2026 The instrument-rt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace irt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;  ///< invalid input or failed validation / selftest
inline constexpr int kExitSolver = 2;   ///< an SDP did not reach optimality
inline constexpr int kExitUsage = 64;

/// Entry point of the instrument-rt tool. Reports go to `out`, diagnostics and
/// usage text to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// Same, with the arguments after the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace irt::cli
