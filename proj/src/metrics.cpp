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

#include "locgc/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace locgc {
namespace {

double median_in_place(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

MetricsReport evaluate(std::span<const double> pred, std::span<const double> truth, double percent_epsilon) {
  if (pred.size() != truth.size()) {
    throw ShapeError("evaluate: " + std::to_string(pred.size()) + " predictions vs " +
                     std::to_string(truth.size()) + " truth values");
  }
  if (pred.empty()) throw ContractError("evaluate: no values");

  MetricsReport r;
  r.count = static_cast<Index>(pred.size());
  std::vector<double> abs_err(pred.size());
  std::vector<double> abs_pct;
  abs_pct.reserve(pred.size());
  double sq = 0, ab = 0, pct = 0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    const double e = pred[k] - truth[k];
    if (!std::isfinite(e)) throw NumericError("evaluate: non-finite value at position " + std::to_string(k));
    sq += e * e;
    ab += std::abs(e);
    abs_err[k] = std::abs(e);
    if (std::abs(truth[k]) >= percent_epsilon) {
      const double p = std::abs(100.0 * e / truth[k]);
      pct += p;
      abs_pct.push_back(p);
    }
  }
  const double n = static_cast<double>(pred.size());
  r.mse = sq / n;
  r.rmse = std::sqrt(r.mse);
  r.mae = ab / n;
  r.mdae = median_in_place(abs_err);
  r.excluded = r.count - static_cast<Index>(abs_pct.size());
  if (!abs_pct.empty()) {
    r.mape = pct / static_cast<double>(abs_pct.size());
    r.mdape = median_in_place(abs_pct);
  }
  return r;
}

std::string format_metric(std::optional<double> v, int precision) {
  if (!v) return "NA";
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << *v;
  return s.str();
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {"MSE", "RMSE", "MAE", "MAPE", "MdAE", "MdAPE"};
  return names;
}

std::vector<std::optional<double>> metric_values(const MetricsReport& r) {
  return {r.mse, r.rmse, r.mae, r.mape, r.mdae, r.mdape};
}

void write_metrics_csv(std::ostream& out, const std::vector<NamedReport>& rows, const std::string& key_column) {
  out << key_column;
  for (const auto& name : metric_names()) out << "," << name;
  out << ",count,excluded\n";
  for (const auto& [key, report] : rows) {
    out << key;
    for (const auto& v : metric_values(report)) out << "," << format_metric(v, 6);
    out << "," << report.count << "," << report.excluded << "\n";
  }
}

void write_comparison_table(std::ostream& out, const std::vector<NamedReport>& columns) {
  constexpr int kWidth = 14;
  out << std::left << std::setw(10) << "";
  for (const auto& [name, report] : columns) out << std::right << std::setw(kWidth) << name;
  out << "\n";
  const std::vector<std::string> labels = {"MSE", "RMSE", "MAE", "MAPE(%)", "MdAE", "MdAPE(%)"};
  for (std::size_t m = 0; m < labels.size(); ++m) {
    out << std::left << std::setw(10) << labels[m];
    for (const auto& [name, report] : columns) {
      out << std::right << std::setw(kWidth) << format_metric(metric_values(report)[m]);
    }
    out << "\n";
  }
}

}  // namespace locgc
