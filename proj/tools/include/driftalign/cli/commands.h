/*
 * Copyright 2026 The DriftAlign Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef DRIFTALIGN_CLI_COMMANDS_H_
#define DRIFTALIGN_CLI_COMMANDS_H_

#include <iosfwd>
#include <span>
#include <string>

namespace driftalign::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 2,
  kExitIo = 3,
  kExitDegenerate = 4,
};

// Entry point shared by the binary and the tests. args excludes argv[0].
int RunCli(std::span<const std::string> args, std::ostream& out,
           std::ostream& err);

}  // namespace driftalign::cli

#endif  // DRIFTALIGN_CLI_COMMANDS_H_
