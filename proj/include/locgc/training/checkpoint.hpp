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

#ifndef LOCGC_TRAINING_CHECKPOINT_HPP
#define LOCGC_TRAINING_CHECKPOINT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "locgc/training/model.hpp"
#include "locgc/training/train.hpp"

namespace locgc {

/// Everything needed to rebuild a trained model, plus how it was trained.
struct Checkpoint {
  Model model;
  TrainConfig train;
  std::vector<EpochRecord> history;
  int epoch = -1;             // epoch the parameters were taken from
  std::string selection;      // "best" or "final"
};

/// 64-bit FNV-1a of the text.
std::uint64_t fnv1a(const std::string& text);

/// Versioned binary container: magic, version, digest of the config text,
/// the config text itself, then named little-endian f64 tensors. Written to
/// a temporary file and renamed into place.
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace locgc

#endif  // LOCGC_TRAINING_CHECKPOINT_HPP
