// Copyright 2026 The DP Manifold Denoising Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPMD_CLI_H_
#define DPMD_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace dpmd {

// Entry point of the `dpmd` tool. `args` excludes the program name.
// Subcommands: generate, denoise, sweep, account. Returns 0 on success and
// non-zero after printing a one-line diagnostic to `err` on failure.
int CliMain(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace dpmd

#endif  // DPMD_CLI_H_
