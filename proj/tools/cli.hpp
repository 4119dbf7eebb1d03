// Copyright 2026 The clcbn Authors
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


#ifndef CLCBN_TOOLS_CLI_HPP_
#define CLCBN_TOOLS_CLI_HPP_

namespace clcbn_cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `clcbn` command; returns the process exit code.
int RunCli(int argc, const char* const* argv);

}  // namespace clcbn_cli

#endif  // CLCBN_TOOLS_CLI_HPP_
