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

#include "locgc/encoding/encoding.hpp"

#include <cmath>
#include <numbers>

namespace locgc {

TrigFeatures trig_encode(TimeIndex t, const CalendarConfig& cfg) {
  if (cfg.moment_num <= 0 || cfg.hour_num <= 0) {
    throw ValidationError("calendar: moment_num and hour_num must be positive");
  }
  if (t.moment < 0 || t.moment >= cfg.moment_num) {
    throw ValidationError("trig_encode: moment index " + std::to_string(t.moment) + " outside [0, " +
                          std::to_string(cfg.moment_num) + ")");
  }
  if (t.hour < 0 || t.hour >= cfg.hour_num) {
    throw ValidationError("trig_encode: hour index " + std::to_string(t.hour) + " outside [0, " +
                          std::to_string(cfg.hour_num) + ")");
  }
  const double moment_angle = 2.0 * std::numbers::pi * static_cast<double>(t.moment) / cfg.moment_num;
  const double hour_angle = 2.0 * std::numbers::pi * static_cast<double>(t.hour) / cfg.hour_num;
  return {std::sin(moment_angle), std::cos(moment_angle), std::sin(hour_angle), std::cos(hour_angle)};
}

TimeIndex wrap(TimeIndex t, const CalendarConfig& cfg) {
  auto mod = [](std::int64_t a, std::int64_t n) { return ((a % n) + n) % n; };
  return {mod(t.moment, cfg.moment_num), mod(t.hour, cfg.hour_num)};
}

StandardizationParams zscore_fit(const Eigen::Ref<const MatrixXd>& columns) {
  if (columns.rows() == 0 || columns.cols() == 0) throw ContractError("zscore_fit: empty data");
  if (columns.rows() < 2) throw ContractError("zscore_fit: need at least 2 rows");
  StandardizationParams p;
  p.mean = columns.colwise().mean();
  const MatrixXd centered = columns.rowwise() - p.mean;
  p.stddev = (centered.array().square().colwise().sum() / static_cast<double>(columns.rows())).sqrt().matrix();
  for (Index j = 0; j < p.stddev.size(); ++j) {
    if (!(p.stddev(j) >= kMinStandardDeviation)) p.stddev(j) = 1.0;
  }
  return p;
}

MatrixXd zscore_apply(const Eigen::Ref<const MatrixXd>& x, const StandardizationParams& params) {
  if (x.cols() != params.columns()) {
    throw ShapeError("zscore_apply: data " + shape_string(x) + " vs " + std::to_string(params.columns()) +
                     " fitted columns");
  }
  return ((x.rowwise() - params.mean).array().rowwise() / params.stddev.array()).matrix();
}

MatrixXd zscore_invert(const Eigen::Ref<const MatrixXd>& z, const StandardizationParams& params) {
  if (z.cols() != params.columns()) {
    throw ShapeError("zscore_invert: data " + shape_string(z) + " vs " + std::to_string(params.columns()) +
                     " fitted columns");
  }
  return ((z.array().rowwise() * params.stddev.array()).matrix()).rowwise() + params.mean;
}

StandardizationAccumulator::StandardizationAccumulator(Index columns)
    : shift_(RowVectorXd::Zero(columns)), sum_(RowVectorXd::Zero(columns)), sum_sq_(RowVectorXd::Zero(columns)) {}

void StandardizationAccumulator::add(const Eigen::Ref<const MatrixXd>& rows) {
  if (rows.cols() != sum_.size()) {
    throw ShapeError("standardization: data " + shape_string(rows) + " vs " + std::to_string(sum_.size()) +
                     " columns");
  }
  if (rows.rows() == 0) return;
  // Shifting by the first row keeps the one-pass variance well conditioned.
  if (!shifted_) {
    shift_ = rows.row(0);
    shifted_ = true;
  }
  const MatrixXd centered = rows.rowwise() - shift_;
  sum_ += centered.colwise().sum();
  sum_sq_ += centered.array().square().matrix().colwise().sum();
  count_ += rows.rows();
}

StandardizationParams StandardizationAccumulator::finish() const {
  if (count_ < 2) throw ContractError("zscore_fit: need at least 2 rows");
  const double n = static_cast<double>(count_);
  const RowVectorXd centered_mean = sum_ / n;
  StandardizationParams p;
  p.mean = shift_ + centered_mean;
  RowVectorXd var = (sum_sq_ / n - centered_mean.array().square().matrix()).cwiseMax(0.0);
  p.stddev = var.cwiseSqrt();
  for (Index j = 0; j < p.stddev.size(); ++j) {
    if (!(p.stddev(j) >= kMinStandardDeviation)) p.stddev(j) = 1.0;
  }
  return p;
}

int Vocabulary::add(const std::string& label) {
  auto it = codes_.find(label);
  if (it != codes_.end()) return it->second;
  labels_.push_back(label);
  const int code = static_cast<int>(labels_.size());
  codes_.emplace(label, code);
  return code;
}

int Vocabulary::code(const std::string& label) const {
  auto it = codes_.find(label);
  return it == codes_.end() ? kUnknown : it->second;
}

}  // namespace locgc
