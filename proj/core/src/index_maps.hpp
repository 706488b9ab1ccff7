// Copyright 2026 The cts Authors
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

#pragma once

#include <Eigen/Core>
#include <vector>

#include "cts/labeled_operator.hpp"

namespace cts::detail {

inline std::vector<std::size_t> strides(const Labels& labels) {
  std::vector<std::size_t> s(labels.size(), 1);
  for (std::size_t k = labels.size(); k-- > 1;) s[k - 1] = s[k] * labels[k].dim;
  return s;
}

// Offsets into the full index of `labels` for every sub-multi-index over the
// labels at `positions`, enumerated with positions[0] most significant.
inline std::vector<Eigen::Index> offset_map(const Labels& labels,
                                            const std::vector<std::size_t>& positions) {
  const auto st = strides(labels);
  std::vector<Eigen::Index> out{0};
  for (auto p : positions) {
    std::vector<Eigen::Index> next;
    next.reserve(out.size() * labels[p].dim);
    for (auto o : out)
      for (std::size_t k = 0; k < labels[p].dim; ++k)
        next.push_back(o + static_cast<Eigen::Index>(k * st[p]));
    out = std::move(next);
  }
  return out;
}

}  // namespace cts::detail
