// Copyright 2026  The tfpaint Authors
//
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

#ifndef TFPAINT_TOOLS_CLI_HPP_
#define TFPAINT_TOOLS_CLI_HPP_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

#include "tfpaint/pipeline.hpp"

namespace tfpaint::cli {

enum ExitCode : int {
  kOk = 0,
  kIoError = 1,     // unreadable input, existing output without --force
  kUsage = 2,       // bad flags or values
  kContext = 3,     // a gap too close to the signal edge
  kDivergence = 4,  // a solver iterate became non-finite
};

// Raw solver flags shared by inpaint, sweep and compare.
struct SolverFlags {
  std::string method = "uphain";
  std::string threshold = "soft";
  std::optional<double> lambda, p, alpha;  // unset: the thresholder's defaults
  std::size_t inner = 500;
  std::size_t outer = 10;
  double eps = 1e-3;
  double relax = 1.0;
  std::size_t pad = 4;
  std::size_t jobs = 1;
};

// Throws InvalidArgument on unknown names or an invalid solver configuration.
InpaintOptions to_options(const SolverFlags &flags);

// Runs the tfpaint command line. argv[0] is the program name.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace tfpaint::cli

#endif  // TFPAINT_TOOLS_CLI_HPP_
