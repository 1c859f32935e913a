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

#ifndef LOCGC_DATA_SYNTHETIC_HPP
#define LOCGC_DATA_SYNTHETIC_HPP

#include <cstdint>

#include "locgc/data/series.hpp"
#include "locgc/graph/road_graph.hpp"

namespace locgc {

/// Four-section directed network 1 -> 2 -> 0 <- 3. Sections 1 and 3 are
/// independent sources: a daily profile (a rectified sinusoid, so traffic
/// stops overnight) scaled by a slowly varying demand level. Section 2
/// replays section 1 `lag_steps` later, and section 0 is the weighted mix
/// weight_from_2 : weight_from_3 of sections 2 and 3, also `lag_steps`
/// later. Every series then receives multiplicative Gaussian noise.
struct SyntheticConfig {
  int days = 30;
  int interval_seconds = 300;
  int lag_steps = 6;
  double weight_from_2 = 2.0;
  double weight_from_3 = 1.0;
  double noise_fraction = 0.05;
  double peak_flow = 200.0;
  double demand_persistence = 0.995;  // AR(1) coefficient of the demand level
  double demand_spread = 0.25;        // stationary std of the relative demand level
  std::int64_t start = 1704067200;    // 2024-01-01T00:00:00, a Monday
  std::uint64_t seed = 1;
};

struct SyntheticNetwork {
  RawSeries series;
  RoadGraph graph;
};

SyntheticNetwork make_synthetic_network(const SyntheticConfig& cfg = {});

}  // namespace locgc

#endif  // LOCGC_DATA_SYNTHETIC_HPP
