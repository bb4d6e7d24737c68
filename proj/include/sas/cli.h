// Copyright 2026 The SAS Authors.
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

#ifndef SAS_CLI_H_
#define SAS_CLI_H_

#include <ostream>

namespace sas {

// Exit codes: 0 success, 1 validation or usage error, 2 I/O error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

// Entry point behind the `sas` tool: subcommands select, diagnose, partition.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sas

#endif  // SAS_CLI_H_
