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

#include "tfpaint/mask.hpp"

#include <algorithm>
#include <string>

#include "tfpaint/errors.hpp"

namespace tfpaint {

ColumnMask ColumnMask::make(std::size_t n_cols, std::vector<std::size_t> zero_cols) {
  std::sort(zero_cols.begin(), zero_cols.end());
  zero_cols.erase(std::unique(zero_cols.begin(), zero_cols.end()), zero_cols.end());
  ColumnMask mask{n_cols, std::move(zero_cols)};
  mask.validate();
  return mask;
}

void ColumnMask::validate() const {
  for (std::size_t i = 0; i < zero_cols.size(); ++i) {
    if (zero_cols[i] >= n_cols)
      throw InvalidArgument("column mask: index " + std::to_string(zero_cols[i]) +
                            " out of range for " + std::to_string(n_cols) + " columns");
    if (i > 0 && zero_cols[i] <= zero_cols[i - 1])
      throw InvalidArgument("column mask: indices must be sorted and unique");
  }
}

std::vector<unsigned char> ColumnMask::reliable_flags() const {
  std::vector<unsigned char> flags(n_cols, 1);
  for (std::size_t c : zero_cols) flags[c] = 0;
  return flags;
}

bool ColumnMask::is_missing(std::size_t col) const {
  return std::binary_search(zero_cols.begin(), zero_cols.end(), col);
}

}  // namespace tfpaint
