// include/mdd/cli.h

// Copyright 2026  The mdd-engine Authors

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

#ifndef MDD_CLI_H_
#define MDD_CLI_H_

namespace mdd {

// Subcommands: synth, init-model, dictate, judge, evaluate, bench, gradcheck.
// Exit codes: 0 success, 1 usage error, 2 data/validation error.
int run_cli(int argc, const char* const* argv);

}  // namespace mdd

#endif  // MDD_CLI_H_
