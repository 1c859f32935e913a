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

#include "locgc/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "locgc/numerics/random.hpp"

namespace locgc {

SyntheticNetwork make_synthetic_network(const SyntheticConfig& cfg) {
  if (cfg.days < 1 || cfg.interval_seconds <= 0 || cfg.lag_steps < 0) {
    throw ValidationError("synthetic: days, interval and lag must be positive");
  }
  if (cfg.weight_from_2 < 0 || cfg.weight_from_3 < 0 || cfg.weight_from_2 + cfg.weight_from_3 <= 0) {
    throw ValidationError("synthetic: mixing weights must be non-negative and not both zero");
  }
  if (!(cfg.demand_persistence >= 0 && cfg.demand_persistence < 1)) {
    throw ValidationError("synthetic: demand persistence must lie in [0, 1)");
  }
  const Index per_day = 86400 / cfg.interval_seconds;
  const Index length = cfg.days * per_day;
  const Index burn = 2 * cfg.lag_steps;
  const Index total = length + burn;
  Rng rng(cfg.seed);

  auto source = [&](double phase) {
    VectorXd x(total);
    const double innovation = cfg.demand_spread * std::sqrt(1 - cfg.demand_persistence * cfg.demand_persistence);
    double level = cfg.demand_spread * rng.normal();
    for (Index t = 0; t < total; ++t) {
      level = cfg.demand_persistence * level + innovation * rng.normal();
      const double angle = 2 * std::numbers::pi * static_cast<double>(t - burn) / static_cast<double>(per_day);
      const double profile = std::max(0.0, std::sin(angle - phase));
      x(t) = cfg.peak_flow * profile * std::exp(level);
    }
    return x;
  };
  const VectorXd x1 = source(std::numbers::pi / 4);
  const VectorXd x3 = source(std::numbers::pi / 3);
  VectorXd x2 = VectorXd::Zero(total);
  VectorXd x0 = VectorXd::Zero(total);
  const double w_sum = cfg.weight_from_2 + cfg.weight_from_3;
  for (Index t = cfg.lag_steps; t < total; ++t) x2(t) = x1(t - cfg.lag_steps);
  for (Index t = cfg.lag_steps; t < total; ++t) {
    x0(t) = (cfg.weight_from_2 * x2(t - cfg.lag_steps) + cfg.weight_from_3 * x3(t - cfg.lag_steps)) / w_sum;
  }

  std::vector<MatrixXd> blocks;
  for (const VectorXd* clean : std::initializer_list<const VectorXd*>{&x0, &x1, &x2, &x3}) {
    MatrixXd b(length, 1);
    for (Index t = 0; t < length; ++t) {
      const double v = (*clean)(burn + t);
      b(t, 0) = std::max(0.0, v * (1 + cfg.noise_fraction * rng.normal()));
    }
    blocks.push_back(std::move(b));
  }
  SyntheticNetwork net{make_series(cfg.start, cfg.interval_seconds, {"flow"}, std::move(blocks)),
                       RoadGraph::from_edges(4, {{1, 2}, {2, 0}, {3, 0}})};
  return net;
}

}  // namespace locgc
