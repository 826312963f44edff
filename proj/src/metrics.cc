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

#include "fedss/metrics.h"

#include "fedss/errors.h"

namespace fedss {

ConfusionMatrix::ConfusionMatrix(std::size_t classes)
    : classes_(classes), counts_(classes * classes, 0) {
  if (classes == 0) throw ConfigError("confusion matrix needs a class");
}

ConfusionMatrix::ConfusionMatrix(
    std::initializer_list<std::initializer_list<std::uint64_t>> rows)
    : ConfusionMatrix(rows.size()) {
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != classes_) throw ConfigError("confusion matrix not square");
    std::size_t j = 0;
    for (std::uint64_t v : row) counts_[i * classes_ + j++] = v;
    ++i;
  }
}

void ConfusionMatrix::Add(std::size_t truth, std::size_t predicted,
                          std::uint64_t count) {
  if (truth >= classes_ || predicted >= classes_) {
    throw ConfigError("class index out of range");
  }
  counts_[truth * classes_ + predicted] += count;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (auto v : counts_) t += v;
  return t;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::uint64_t t = 0;
  for (std::size_t j = 0; j < classes_; ++j) t += at(truth, j);
  return t;
}

std::uint64_t ConfusionMatrix::column_sum(std::size_t predicted) const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < classes_; ++i) t += at(i, predicted);
  return t;
}

OneVsRest CountsFor(const ConfusionMatrix& cm, std::size_t cls) {
  OneVsRest c;
  c.tp = cm.at(cls, cls);
  c.fn = cm.row_sum(cls) - c.tp;
  c.fp = cm.column_sum(cls) - c.tp;
  c.tn = cm.total() - c.tp - c.fn - c.fp;
  return c;
}

double Accuracy(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) return 0.0;
  std::uint64_t trace = 0;
  for (std::size_t c = 0; c < cm.classes(); ++c) trace += cm.at(c, c);
  return static_cast<double>(trace) / static_cast<double>(total);
}

std::vector<ClassScore> PrecisionRecallPerClass(const ConfusionMatrix& cm) {
  std::vector<ClassScore> out(cm.classes());
  for (std::size_t c = 0; c < cm.classes(); ++c) {
    const auto tp = static_cast<double>(cm.at(c, c));
    const std::uint64_t predicted = cm.column_sum(c);
    const std::uint64_t actual = cm.row_sum(c);
    if (predicted == 0) {
      out[c].precision_undefined = true;
    } else {
      out[c].precision = tp / static_cast<double>(predicted);
    }
    if (actual == 0) {
      out[c].recall_undefined = true;
    } else {
      out[c].recall = tp / static_cast<double>(actual);
    }
  }
  return out;
}

double F1Weighted(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) return 0.0;
  const auto scores = PrecisionRecallPerClass(cm);
  double f1 = 0.0;
  for (std::size_t c = 0; c < cm.classes(); ++c) {
    const double p = scores[c].precision;
    const double r = scores[c].recall;
    const double class_f1 = (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    f1 += static_cast<double>(cm.row_sum(c)) / static_cast<double>(total) *
          class_f1;
  }
  return f1;
}

}  // namespace fedss
