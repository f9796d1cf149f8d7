// Copyright 2026 The TextShield Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TEXTSHIELD_AUGMENT_HPP_
#define TEXTSHIELD_AUGMENT_HPP_

#include "textshield/transforms.hpp"
#include "textshield/types.hpp"

namespace textshield {

inline constexpr const char* kAugmentedIdSuffix = "#aug";

// Originals followed by one randomized copy per example (labels kept). A copy
// whose transform throws is dropped with a warning.
inline Dataset augment_with_transform(const Dataset& train, const TextTransform& transform, std::uint64_t seed) {
  Dataset out = train;
  const RngStream root(seed, {fnv1a64("augment")});
  for (std::size_t i = 0; i < train.examples.size(); ++i) {
    const auto& ex = train.examples[i];
    RngStream rng = root.child(i);
    TextExample copy = ex;
    copy.id = ex.id + kAugmentedIdSuffix;
    try {
      copy.text = transform(ex.text, rng);
    } catch (const std::exception& e) {
      log_warning("augmentation failed on '" + ex.id + "': " + e.what());
      continue;
    }
    if (trim(copy.text).empty()) {
      log_warning("augmentation produced empty text for '" + ex.id + "'");
      continue;
    }
    out.examples.push_back(std::move(copy));
  }
  return out;
}

}  // namespace textshield

#endif  // TEXTSHIELD_AUGMENT_HPP_
