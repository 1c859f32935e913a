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

#include "locgc/data/series.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "csv_util.hpp"

namespace locgc {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;
constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string> kOptionalNumeric = {"speed", "density", "heavy_ratio", "lane_count"};

bool parse_fixed(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  out = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    out = out * 10 + (s[i] - '0');
  }
  return true;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

struct Record {
  std::int64_t time;
  Index node;
  std::vector<double> values;
  std::string weather;
};

}  // namespace

std::optional<std::int64_t> parse_timestamp(const std::string& text) {
  std::string_view s = csv::trim(text);
  if (!s.empty() && s.back() == 'Z') s.remove_suffix(1);
  int y, mo, d, h, mi, sec = 0;
  if (s.size() != 16 && s.size() != 19) return std::nullopt;
  if (!parse_fixed(s, 0, 4, y) || s[4] != '-' || !parse_fixed(s, 5, 2, mo) || s[7] != '-' ||
      !parse_fixed(s, 8, 2, d) || (s[10] != 'T' && s[10] != ' ') || !parse_fixed(s, 11, 2, h) ||
      s[13] != ':' || !parse_fixed(s, 14, 2, mi)) {
    return std::nullopt;
  }
  if (s.size() == 19 && (s[16] != ':' || !parse_fixed(s, 17, 2, sec))) return std::nullopt;
  if (h > 23 || mi > 59 || sec > 59) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  const std::int64_t days = std::chrono::sys_days(ymd).time_since_epoch().count();
  return days * kSecondsPerDay + h * 3600 + mi * 60 + sec;
}

std::string format_timestamp(std::int64_t seconds) {
  const std::int64_t days = floor_div(seconds, kSecondsPerDay);
  const std::int64_t rem = seconds - days * kSecondsPerDay;
  const std::chrono::year_month_day ymd{std::chrono::sys_days(std::chrono::days(days))};
  std::ostringstream out;
  out << std::setfill('0') << std::setw(4) << static_cast<int>(ymd.year()) << '-' << std::setw(2)
      << static_cast<unsigned>(ymd.month()) << '-' << std::setw(2) << static_cast<unsigned>(ymd.day()) << 'T'
      << std::setw(2) << rem / 3600 << ':' << std::setw(2) << (rem / 60) % 60 << ':' << std::setw(2) << rem % 60;
  return out.str();
}

TimeIndex time_index(std::int64_t seconds, const CalendarConfig& cfg, int day_start_minute, int interval_seconds) {
  if (interval_seconds <= 0) throw ContractError("time_index: interval must be positive");
  const std::int64_t days = floor_div(seconds, kSecondsPerDay);
  const std::int64_t second_of_day = seconds - days * kSecondsPerDay;
  const std::int64_t shifted = second_of_day - static_cast<std::int64_t>(day_start_minute) * 60;
  TimeIndex t;
  t.moment = floor_div(shifted, interval_seconds);
  // 1970-01-01 was a Thursday; Monday is weekday 0.
  const std::int64_t weekday = ((days + 3) % 7 + 7) % 7;
  t.hour = weekday * 24 + second_of_day / 3600;
  return wrap(t, cfg);
}

Index RawSeries::missing_cells() const {
  Index total = 0;
  for (const auto& m : missing) total += m.count();
  if (has_weather) {
    for (const auto& w : weather) total += std::count(w.begin(), w.end(), std::string());
  }
  return total;
}

RawSeries ingest_csv(const std::string& path, const IngestOptions& options) {
  if (options.interval_seconds <= 0) throw ValidationError("ingest: interval must be positive");
  if (options.max_fill_gap < 0) throw ValidationError("ingest: max_fill_gap must be >= 0");
  std::ifstream in = csv::open(path);
  std::string line;
  std::size_t line_no = 0;

  // Header.
  int col_time = -1, col_node = -1, col_weather = -1;
  std::vector<int> numeric_cols;  // field index per numeric column, flow first
  RawSeries series;
  series.interval_seconds = options.interval_seconds;
  while (std::getline(in, line)) {
    ++line_no;
    if (!csv::trim(line).empty()) break;
  }
  {
    const auto fields = csv::split(line);
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const std::string name(fields[i]);
      if (index.count(name)) throw ParseError("ingest: duplicate column '" + name + "'", line_no);
      index[name] = static_cast<int>(i);
    }
    for (const char* required : {"timestamp", "node_id", "flow"}) {
      if (!index.count(required)) {
        throw ParseError("ingest: missing required column '" + std::string(required) + "'", line_no);
      }
    }
    col_time = index["timestamp"];
    col_node = index["node_id"];
    series.numeric_columns.push_back("flow");
    numeric_cols.push_back(index["flow"]);
    for (const auto& name : kOptionalNumeric) {
      if (index.count(name)) {
        series.numeric_columns.push_back(name);
        numeric_cols.push_back(index[name]);
      }
    }
    if (index.count("weather")) {
      series.has_weather = true;
      col_weather = index["weather"];
    }
  }
  const std::size_t width = csv::split(line).size();

  std::vector<Record> records;
  Index max_node = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != width) {
      throw ParseError("ingest: expected " + std::to_string(width) + " fields, got " + std::to_string(fields.size()),
                       line_no);
    }
    Record r;
    const auto t = parse_timestamp(std::string(fields[col_time]));
    if (!t) throw ParseError("ingest: bad timestamp '" + std::string(fields[col_time]) + "'", line_no);
    r.time = *t;
    std::int64_t node = 0;
    if (!csv::parse_int(fields[col_node], node) || node < 0) {
      throw ParseError("ingest: bad node id '" + std::string(fields[col_node]) + "'", line_no);
    }
    if (options.expected_nodes > 0 && node >= options.expected_nodes) {
      throw ValidationError("ingest: unknown node id " + std::to_string(node) + " (line " + std::to_string(line_no) +
                            ")");
    }
    r.node = static_cast<Index>(node);
    for (std::size_t c = 0; c < numeric_cols.size(); ++c) {
      const auto field = fields[numeric_cols[c]];
      double v = kMissing;
      if (!field.empty() && !csv::parse_double(field, v)) {
        throw ParseError("ingest: non-numeric " + series.numeric_columns[c] + " '" + std::string(field) + "'", line_no);
      }
      if (!field.empty() && !std::isfinite(v)) {
        throw ParseError("ingest: non-finite " + series.numeric_columns[c], line_no);
      }
      r.values.push_back(v);
    }
    if (col_weather >= 0) r.weather = std::string(fields[col_weather]);
    max_node = std::max(max_node, r.node);
    records.push_back(std::move(r));
  }
  if (records.empty()) throw ValidationError("ingest: '" + path + "' has no records");
  series.record_count = static_cast<Index>(records.size());
  series.node_count = options.expected_nodes > 0 ? options.expected_nodes : max_node + 1;

  // Grid.
  std::vector<std::int64_t> stamps;
  stamps.reserve(records.size());
  for (const auto& r : records) stamps.push_back(r.time);
  std::sort(stamps.begin(), stamps.end());
  stamps.erase(std::unique(stamps.begin(), stamps.end()), stamps.end());
  const std::int64_t step = options.interval_seconds;
  Index span_begin = 0;
  series.times.push_back(stamps.front());
  for (std::size_t i = 1; i < stamps.size(); ++i) {
    const std::int64_t gap = stamps[i] - stamps[i - 1];
    if (gap % step == 0 && gap / step - 1 <= options.max_fill_gap) {
      for (std::int64_t t = stamps[i - 1] + step; t < stamps[i]; t += step) series.times.push_back(t);
    } else {
      series.spans.emplace_back(span_begin, series.time_count());
      span_begin = series.time_count();
    }
    series.times.push_back(stamps[i]);
  }
  series.spans.emplace_back(span_begin, series.time_count());

  const Index n_times = series.time_count();
  const Index n_cols = static_cast<Index>(series.numeric_columns.size());
  series.values.assign(series.node_count, MatrixXd::Constant(n_times, n_cols, kMissing));
  series.missing.assign(series.node_count, MissingMask::Constant(n_times, n_cols, true));
  if (series.has_weather) series.weather.assign(series.node_count, std::vector<std::string>(n_times));
  std::vector<std::vector<bool>> seen(series.node_count, std::vector<bool>(n_times, false));
  for (const auto& r : records) {
    const Index t = std::lower_bound(series.times.begin(), series.times.end(), r.time) - series.times.begin();
    if (seen[r.node][t]) {
      throw ValidationError("ingest: duplicate record for node " + std::to_string(r.node) + " at " +
                            format_timestamp(r.time));
    }
    seen[r.node][t] = true;
    for (Index c = 0; c < n_cols; ++c) {
      if (!std::isnan(r.values[c])) {
        series.values[r.node](t, c) = r.values[c];
        series.missing[r.node](t, c) = false;
      }
    }
    if (series.has_weather) series.weather[r.node][t] = r.weather;
  }
  for (Index n = 0; n < series.node_count; ++n) {
    if (std::none_of(seen[n].begin(), seen[n].end(), [](bool b) { return b; })) {
      throw ValidationError("ingest: node " + std::to_string(n) + " has no records");
    }
  }
  return series;
}

void write_flow_csv(const std::string& path, const RawSeries& series) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << "timestamp,node_id";
  for (const auto& c : series.numeric_columns) out << ',' << c;
  if (series.has_weather) out << ",weather";
  out << '\n' << std::setprecision(17);
  for (Index t = 0; t < series.time_count(); ++t) {
    const std::string stamp = format_timestamp(series.times[t]);
    for (Index n = 0; n < series.node_count; ++n) {
      out << stamp << ',' << n;
      for (Index c = 0; c < series.values[n].cols(); ++c) {
        out << ',';
        if (!series.missing[n](t, c)) out << series.values[n](t, c);
      }
      if (series.has_weather) out << ',' << series.weather[n][t];
      out << '\n';
    }
  }
  if (!out) throw ValidationError("write failed for '" + path + "'");
}

RawSeries make_series(std::int64_t start, int interval_seconds, std::vector<std::string> numeric_columns,
                      std::vector<MatrixXd> values) {
  if (values.empty()) throw ValidationError("make_series: no nodes");
  if (numeric_columns.empty() || numeric_columns.front() != "flow") {
    throw ValidationError("make_series: the first column must be flow");
  }
  RawSeries s;
  s.node_count = static_cast<Index>(values.size());
  s.interval_seconds = interval_seconds;
  s.numeric_columns = std::move(numeric_columns);
  const Index n_times = values.front().rows();
  for (const auto& v : values) {
    if (v.rows() != n_times || v.cols() != static_cast<Index>(s.numeric_columns.size())) {
      throw ShapeError("make_series: node block " + shape_string(v));
    }
  }
  for (Index t = 0; t < n_times; ++t) s.times.push_back(start + t * interval_seconds);
  s.spans.emplace_back(0, n_times);
  for (const auto& v : values) s.missing.push_back(MissingMask::Constant(v.rows(), v.cols(), false));
  s.values = std::move(values);
  s.record_count = s.node_count * n_times;
  return s;
}

RawSeries impute_knn(const RawSeries& series, int k) {
  if (k < 1) throw ContractError("impute_knn: k must be >= 1");
  RawSeries out = series;
  const Index n_times = series.time_count();
  const double step = series.interval_seconds;
  std::vector<Index> observed;
  for (Index n = 0; n < series.node_count; ++n) {
    const MatrixXd& values = series.values[n];
    for (Index c = 0; c < values.cols(); ++c) {
      observed.clear();
      for (Index t = 0; t < n_times; ++t) {
        if (!series.missing[n](t, c)) observed.push_back(t);
      }
      if (static_cast<Index>(observed.size()) == n_times) continue;
      if (static_cast<Index>(observed.size()) < k) {
        throw ImputationError(n, series.numeric_columns[c], static_cast<Index>(observed.size()), k);
      }
      for (Index t = 0; t < n_times; ++t) {
        if (!series.missing[n](t, c)) continue;
        // Expand outwards from the insertion point, earlier neighbour first on ties.
        auto right = std::lower_bound(observed.begin(), observed.end(), t);
        auto left = right;
        double weighted = 0, weights = 0;
        for (int taken = 0; taken < k; ++taken) {
          Index pick;
          const bool has_left = left != observed.begin();
          const bool has_right = right != observed.end();
          const std::int64_t dl = has_left ? series.times[t] - series.times[*(left - 1)] : 0;
          const std::int64_t dr = has_right ? series.times[*right] - series.times[t] : 0;
          if (has_left && (!has_right || dl <= dr)) {
            pick = *--left;
          } else {
            pick = *right++;
          }
          const double distance = std::abs(static_cast<double>(series.times[pick] - series.times[t])) / step;
          const double w = 1.0 / distance;
          weighted += w * values(pick, c);
          weights += w;
        }
        out.values[n](t, c) = weighted / weights;
        out.missing[n](t, c) = false;
      }
    }
    if (series.has_weather) {
      const auto& labels = series.weather[n];
      std::vector<Index> have;
      for (Index t = 0; t < n_times; ++t) {
        if (!labels[t].empty()) have.push_back(t);
      }
      if (static_cast<Index>(have.size()) == n_times) continue;
      if (have.empty()) throw ImputationError(n, "weather", 0, 1);
      for (Index t = 0; t < n_times; ++t) {
        if (!labels[t].empty()) continue;
        auto right = std::lower_bound(have.begin(), have.end(), t);
        Index pick;
        if (right == have.begin()) {
          pick = *right;
        } else if (right == have.end()) {
          pick = *(right - 1);
        } else {
          pick = (series.times[t] - series.times[*(right - 1)] <= series.times[*right] - series.times[t]) ? *(right - 1)
                                                                                                          : *right;
        }
        out.weather[n][t] = labels[pick];
      }
    }
  }
  return out;
}

Vocabulary build_vocabulary(const RawSeries& series, std::optional<std::int64_t> cutoff) {
  Vocabulary vocab;
  if (!series.has_weather) return vocab;
  for (Index t = 0; t < series.time_count(); ++t) {
    if (cutoff && series.times[t] >= *cutoff) break;
    for (Index n = 0; n < series.node_count; ++n) {
      if (!series.weather[n][t].empty()) vocab.add(series.weather[n][t]);
    }
  }
  return vocab;
}

NodeFeatures build_features(const RawSeries& series, const CalendarConfig& calendar, int day_start_minute,
                            const Vocabulary& vocabulary) {
  if (series.missing_cells() > 0) throw ContractError("build_features: series still has missing cells");
  NodeFeatures f;
  f.names = series.numeric_columns;
  if (series.has_weather) f.names.push_back("weather");
  for (const char* name : {"moment_sin", "moment_cos", "hour_sin", "hour_cos"}) f.names.push_back(name);
  const Index n_times = series.time_count();
  const Index n_numeric = static_cast<Index>(series.numeric_columns.size());
  const Index width = static_cast<Index>(f.names.size());

  MatrixXd trig(n_times, 4);
  for (Index t = 0; t < n_times; ++t) {
    const TrigFeatures e =
        trig_encode(time_index(series.times[t], calendar, day_start_minute, series.interval_seconds), calendar);
    trig.row(t) << e.moment_sin, e.moment_cos, e.hour_sin, e.hour_cos;
  }
  for (Index n = 0; n < series.node_count; ++n) {
    MatrixXd block(n_times, width);
    block.leftCols(n_numeric) = series.values[n];
    if (series.has_weather) {
      for (Index t = 0; t < n_times; ++t) block(t, n_numeric) = vocabulary.code(series.weather[n][t]);
    }
    block.rightCols(4) = trig;
    f.per_node.push_back(std::move(block));
  }
  return f;
}

}  // namespace locgc
