// wcfa/cli.h

// Copyright 2026  The wcfa Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef WCFA_CLI_H_
#define WCFA_CLI_H_

#include <string>
#include <vector>

namespace wcfa {

/// Entry point of the `wcfa` tool. Returns the process exit code; errors are
/// reported as one "wcfa: error: ..." line on stderr.
int run_cli(int argc, const char *const *argv);
int run_cli(const std::vector<std::string> &args);  // args[0] is the program

}  // namespace wcfa

#endif  // WCFA_CLI_H_
