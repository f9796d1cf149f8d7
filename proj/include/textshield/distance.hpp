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

#ifndef TEXTSHIELD_DISTANCE_HPP_
#define TEXTSHIELD_DISTANCE_HPP_

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "textshield/text.hpp"

namespace textshield {

inline double cosine_similarity(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("cosine_similarity: dimension mismatch");
  double dot = 0, nx = 0, ny = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    nx += x[i] * x[i];
    ny += y[i] * y[i];
  }
  if (nx == 0.0 || ny == 0.0) throw Error("cosine_similarity: undefined for a zero vector");
  const double c = dot / (std::sqrt(nx) * std::sqrt(ny));
  return std::clamp(c, -1.0, 1.0);
}

inline std::set<std::string> word_set(std::string_view text) {
  std::set<std::string> s;
  for (auto& t : tokenize(text))
    if (!is_punct_token(t)) s.insert(std::move(t));
  return s;
}

// |A ∩ B| / |A ∪ B| over deduplicated word sets.
inline double jaccard(std::string_view a, std::string_view b) {
  const auto sa = word_set(a), sb = word_set(b);
  if (sa.empty() && sb.empty()) throw Error("jaccard: both texts are empty");
  std::size_t inter = 0;
  for (const auto& w : sa) inter += sb.count(w);
  const std::size_t uni = sa.size() + sb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// Character-level edit distance (insert, delete, substitute) over code points.
inline std::size_t levenshtein(std::string_view a, std::string_view b) {
  const std::u32string s = utf8_decode(a), t = utf8_decode(b);
  if (s.empty()) return t.size();
  if (t.empty()) return s.size();
  std::vector<std::size_t> prev(t.size() + 1), cur(t.size() + 1);
  for (std::size_t j = 0; j <= t.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= s.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= t.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (s[i - 1] == t[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[t.size()];
}

// Fraction of words changed by a substitution-only edit.
inline double perturbation_rate(std::string_view original, std::string_view adversarial) {
  const Tokens a = tokenize(original), b = tokenize(adversarial);
  if (a.size() != b.size())
    throw Error("perturbation_rate: token counts differ (" + std::to_string(a.size()) + " vs " +
                std::to_string(b.size()) + "); not a substitution edit");
  const auto words = word_positions(a);
  if (words.empty()) return 0.0;
  std::size_t changed = 0;
  for (std::size_t i = 0; i < a.size(); ++i) changed += a[i] != b[i];
  return static_cast<double>(changed) / static_cast<double>(words.size());
}

}  // namespace textshield

#endif  // TEXTSHIELD_DISTANCE_HPP_
