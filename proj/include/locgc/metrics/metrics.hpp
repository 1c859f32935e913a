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

#ifndef LOCGC_METRICS_METRICS_HPP
#define LOCGC_METRICS_METRICS_HPP

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "locgc/core.hpp"

namespace locgc {

/// Truth values with |y| below this are left out of the percentage metrics.
inline constexpr double kPercentEpsilon = 1e-6;

/// Pooled error summary of a prediction set. Percentage metrics are empty
/// when every truth value was excluded.
struct MetricsReport {
  double mse = 0;
  double rmse = 0;
  double mae = 0;
  std::optional<double> mape;  // percent
  double mdae = 0;
  std::optional<double> mdape;  // percent
  Index count = 0;
  Index excluded = 0;  // entries left out of MAPE/MdAPE
};

/// RMSE, MAE, MAPE, MdAE and MdAPE over paired values. The median of an even
/// count is the mean of the two central values.
MetricsReport evaluate(std::span<const double> pred, std::span<const double> truth,
                       double percent_epsilon = kPercentEpsilon);

template <typename DerivedA, typename DerivedB>
MetricsReport evaluate(const Eigen::DenseBase<DerivedA>& pred, const Eigen::DenseBase<DerivedB>& truth) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols()) {
    throw ShapeError("evaluate: " + shape_string(pred) + " vs " + shape_string(truth));
  }
  const Matrix<double> p = pred.derived().template cast<double>();
  const Matrix<double> t = truth.derived().template cast<double>();
  return evaluate(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())),
                  std::span<const double>(t.data(), static_cast<std::size_t>(t.size())));
}

/// Value or "NA" for undefined percentage metrics.
std::string format_metric(std::optional<double> v, int precision = 3);

/// Metric names in table order: MSE, RMSE, MAE, MAPE, MdAE, MdAPE.
const std::vector<std::string>& metric_names();
std::vector<std::optional<double>> metric_values(const MetricsReport& r);

using NamedReport = std::pair<std::string, MetricsReport>;

/// One row per model, one column per metric.
void write_metrics_csv(std::ostream& out, const std::vector<NamedReport>& rows,
                       const std::string& key_column = "model");

/// Human-readable layout with metrics as rows and models as columns.
void write_comparison_table(std::ostream& out, const std::vector<NamedReport>& columns);

}  // namespace locgc

#endif  // LOCGC_METRICS_METRICS_HPP
