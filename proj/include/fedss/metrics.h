// Copyright 2026 The fedss Authors.
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

#ifndef FEDSS_METRICS_H_
#define FEDSS_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fedss {

// Rows are the true class, columns the predicted class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes);
  ConfusionMatrix(std::initializer_list<std::initializer_list<std::uint64_t>> rows);

  void Add(std::size_t truth, std::size_t predicted, std::uint64_t count = 1);

  std::size_t classes() const { return classes_; }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * classes_ + predicted];
  }
  std::uint64_t total() const;
  std::uint64_t row_sum(std::size_t truth) const;
  std::uint64_t column_sum(std::size_t predicted) const;

 private:
  std::size_t classes_;
  std::vector<std::uint64_t> counts_;
};

struct OneVsRest {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
};

OneVsRest CountsFor(const ConfusionMatrix& cm, std::size_t cls);

// trace / total; 0 for an empty matrix.
double Accuracy(const ConfusionMatrix& cm);

// A zero denominator yields 0 with the matching *_undefined flag set.
struct ClassScore {
  double precision = 0.0;
  double recall = 0.0;
  bool precision_undefined = false;
  bool recall_undefined = false;
};

std::vector<ClassScore> PrecisionRecallPerClass(const ConfusionMatrix& cm);

// Per-class F1 averaged with true-class frequency weights.
double F1Weighted(const ConfusionMatrix& cm);

}  // namespace fedss

#endif  // FEDSS_METRICS_H_
