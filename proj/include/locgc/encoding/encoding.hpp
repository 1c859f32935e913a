// Copyright 2026 The locgc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LOCGC_ENCODING_ENCODING_HPP
#define LOCGC_ENCODING_ENCODING_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "locgc/core.hpp"

namespace locgc {

/// Cycle lengths for the periodic time features.
struct CalendarConfig {
  int moment_num = 288;  // 5-minute intervals in the daily observation span
  int hour_num = 168;    // hours per week
};

/// Position of a time point inside the daily and weekly cycles.
struct TimeIndex {
  std::int64_t moment = 0;  // i: 5-minute slot of the day, 0 <= i < moment_num
  std::int64_t hour = 0;    // j: hour of the week, 0 <= j < hour_num
};

struct TrigFeatures {
  double moment_sin = 0;
  double moment_cos = 0;
  double hour_sin = 0;
  double hour_cos = 0;
};

/// sin/cos of 2πi/moment_num and 2πj/hour_num. Out-of-range indices raise
/// ValidationError; use wrap() to reduce arbitrary indices first.
TrigFeatures trig_encode(TimeIndex t, const CalendarConfig& cfg);

/// Reduces both indices into their cycles (mathematical modulo).
TimeIndex wrap(TimeIndex t, const CalendarConfig& cfg);

inline constexpr double kMinStandardDeviation = 1e-12;

/// Per-column z-score parameters. Columns whose spread is below
/// kMinStandardDeviation keep a unit scale, so they standardize to zero.
struct StandardizationParams {
  RowVectorXd mean;
  RowVectorXd stddev;

  Index columns() const { return mean.size(); }
  bool operator==(const StandardizationParams&) const = default;
};

/// Fits mean and population standard deviation of every column.
StandardizationParams zscore_fit(const Eigen::Ref<const MatrixXd>& columns);

MatrixXd zscore_apply(const Eigen::Ref<const MatrixXd>& x, const StandardizationParams& params);
MatrixXd zscore_invert(const Eigen::Ref<const MatrixXd>& z, const StandardizationParams& params);

/// Accumulates sums for a fit over data that arrives in pieces.
class StandardizationAccumulator {
 public:
  explicit StandardizationAccumulator(Index columns);
  void add(const Eigen::Ref<const MatrixXd>& rows);
  Index rows() const { return count_; }
  StandardizationParams finish() const;

 private:
  Index count_ = 0;
  RowVectorXd shift_;
  RowVectorXd sum_;
  RowVectorXd sum_sq_;
  bool shifted_ = false;
};

/// Label-to-code mapping in first-seen order. Code 0 is reserved for labels
/// not seen while building.
class Vocabulary {
 public:
  static constexpr int kUnknown = 0;

  /// Returns the label's code, assigning the next free one if new.
  int add(const std::string& label);

  /// Returns the label's code or kUnknown.
  int code(const std::string& label) const;

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::map<std::string, int> codes_;
  std::vector<std::string> labels_;
};

}  // namespace locgc

#endif  // LOCGC_ENCODING_ENCODING_HPP
