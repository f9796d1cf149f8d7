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

#ifndef TEXTSHIELD_SUGGESTER_HPP_
#define TEXTSHIELD_SUGGESTER_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "textshield/language_model.hpp"

namespace textshield {

// Fill-in-the-blank interface: ranked candidates for the masked slot
// between `left` and `right`.
class FillInSuggester {
 public:
  virtual ~FillInSuggester() = default;
  virtual std::vector<std::string> suggest(const Tokens& left, const Tokens& right, std::size_t k) const = 0;

  // Fills for a slot that currently holds `current`, for models that read
  // the unmasked input. Defaults to the masked ranking.
  virtual std::vector<std::string> suggest_for(const Tokens& left, const Tokens& right, const std::string& current,
                                               std::size_t k) const {
    (void)current;
    return suggest(left, right, k);
  }
};

// Bigram fill-in model: score(w) = log P(w | left) + log P(right | w), plus
// `affinity_weight * affinity(current, w)` when the current word is visible.
// Punctuation is never proposed. Ties rank lexicographically.
class NgramSuggester : public FillInSuggester {
 public:
  using Affinity = std::function<double(const std::string&, const std::string&)>;

  explicit NgramSuggester(NgramLanguageModel lm, Affinity affinity = {}, double affinity_weight = 0.0)
      : lm_(std::move(lm)), affinity_(std::move(affinity)), affinity_weight_(affinity_weight) {
    if (lm_.order() != 2) throw Error("NgramSuggester needs a bigram model");
    for (const auto& w : lm_.vocabulary())
      if (!is_punct_token(w)) candidates_.push_back(w);
  }

  std::vector<std::string> suggest(const Tokens& left, const Tokens& right, std::size_t k) const override {
    return rank(left, right, nullptr, k);
  }

  std::vector<std::string> suggest_for(const Tokens& left, const Tokens& right, const std::string& current,
                                       std::size_t k) const override {
    return rank(left, right, &current, k);
  }

  const NgramLanguageModel& model() const { return lm_; }

 private:
  std::vector<std::string> rank(const Tokens& left, const Tokens& right, const std::string* current,
                                std::size_t k) const {
    const std::string prev = left.empty() ? NgramLanguageModel::kStart : left.back();
    std::vector<std::pair<double, const std::string*>> scored;
    scored.reserve(candidates_.size());
    for (const auto& w : candidates_) {
      double s = std::log(lm_.prob(prev, w));
      if (!right.empty()) s += std::log(lm_.prob(w, right.front()));
      if (current && affinity_) s += affinity_weight_ * affinity_(*current, w);
      scored.emplace_back(s, &w);
    }
    const std::size_t n = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && *a.second < *b.second); });
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(*scored[i].second);
    return out;
  }

  NgramLanguageModel lm_;
  Affinity affinity_;
  double affinity_weight_;
  std::vector<std::string> candidates_;
};

}  // namespace textshield

#endif  // TEXTSHIELD_SUGGESTER_HPP_
