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

#ifndef TFPAINT_MASK_HPP_
#define TFPAINT_MASK_HPP_

#include <cstddef>
#include <vector>

namespace tfpaint {

// Spectrogram columns that are missing (zeroed) in the observation. All other
// columns are reliable.
struct ColumnMask {
  std::size_t n_cols = 0;
  std::vector<std::size_t> zero_cols;  // sorted, unique, < n_cols

  // Sorts and deduplicates; throws InvalidArgument on out-of-range indices.
  static ColumnMask make(std::size_t n_cols, std::vector<std::size_t> zero_cols);
  static ColumnMask none(std::size_t n_cols) { return {n_cols, {}}; }

  // Throws InvalidArgument unless the invariants hold.
  void validate() const;

  // 1 for reliable columns, 0 for missing ones.
  std::vector<unsigned char> reliable_flags() const;
  bool is_missing(std::size_t col) const;

  bool operator==(const ColumnMask &) const = default;
};

}  // namespace tfpaint

#endif  // TFPAINT_MASK_HPP_
