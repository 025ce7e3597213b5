// Copyright 2026 The dpk Authors.
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

#ifndef DPK_CLI_HPP
#define DPK_CLI_HPP

/// @file cli.hpp
/// Command-line front end. Exit codes: 0 success, 1 computation error,
/// 2 usage or input error. Data goes to `out`, diagnostics to `err`.

#include <ostream>
#include <string>
#include <vector>

namespace dpk::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dpk::cli

#endif  // DPK_CLI_HPP
