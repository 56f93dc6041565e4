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

#ifndef TFPAINT_ERRORS_HPP_
#define TFPAINT_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tfpaint {

// Bad arguments, shape mismatches, violated preconditions.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The frame operator of a window has a non-positive diagonal entry, so no
// tight version of the window exists for the given geometry.
class DegenerateWindow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A gap does not have enough reliable columns around it to build a segment.
class ContextError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A solver iterate became NaN or infinite.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string &what, std::size_t iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tfpaint

#endif  // TFPAINT_ERRORS_HPP_
