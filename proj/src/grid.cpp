// Copyright 2026 The heatloss Authors
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

#include "heatloss/grid.hpp"

#include <string>

namespace heatloss {

namespace {

void check_dims(int width, int height) {
  require(width >= 1 && height >= 1, ErrorCode::kInvalidArgument,
          "grid dimensions must be positive, got " + std::to_string(width) + "x" +
              std::to_string(height));
}

}  // namespace

Grid::Grid(int width, int height, double fill) : width_(width), height_(height) {
  check_dims(width, height);
  values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Grid::Grid(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  check_dims(width, height);
  require(values_.size() == static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
          ErrorCode::kDimMismatch,
          "grid value count " + std::to_string(values_.size()) + " does not match " +
              std::to_string(width) + "x" + std::to_string(height));
}

}  // namespace heatloss
