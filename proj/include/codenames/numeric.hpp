// Copyright 2026 The Codenames WSF Authors.
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

#include <cmath>
#include <span>

namespace codenames {

// Neumaier-compensated accumulator. Results agree across summation orders to
// well within 1e-12 for the magnitudes used here.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

template <typename A, typename B>
double compensated_dot(std::span<const A> a, std::span<const B> b) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc.add(static_cast<double>(a[i]) * static_cast<double>(b[i]));
  }
  return acc.value();
}

}  // namespace codenames
