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

#ifndef TEXTSHIELD_SPELLING_HPP_
#define TEXTSHIELD_SPELLING_HPP_

#include <map>
#include <string>
#include <vector>

#include "textshield/distance.hpp"
#include "textshield/lexicon.hpp"

namespace textshield {

class SpellingRestorer {
 public:
  virtual ~SpellingRestorer() = default;
  virtual std::string restore(const std::string& text) const = 0;
};

// Replaces every out-of-lexicon word by the closest known word within edit
// distance 2. Ties go to the more frequent word, then the lexicographically
// smaller one. Words with no neighbour stay as they are.
class LexiconSpellingRestorer : public SpellingRestorer {
 public:
  explicit LexiconSpellingRestorer(KnownWords words, std::size_t max_distance = 2)
      : words_(std::move(words)), max_distance_(max_distance) {
    for (const auto& [w, f] : words_.words()) by_length_[utf8_decode(w).size()].push_back(w);
  }

  std::string correct_word(const std::string& word) const {
    if (words_.contains(word) || is_punct_token(word)) return word;
    const std::size_t len = utf8_decode(word).size();
    const std::string* best = nullptr;
    std::size_t best_d = max_distance_ + 1;
    std::uint64_t best_f = 0;
    const std::size_t lo = len > max_distance_ ? len - max_distance_ : 0;
    for (std::size_t l = lo; l <= len + max_distance_; ++l) {
      auto it = by_length_.find(l);
      if (it == by_length_.end()) continue;
      for (const auto& cand : it->second) {
        const std::size_t d = levenshtein(word, cand);
        if (d > max_distance_) continue;
        const std::uint64_t f = words_.frequency(cand);
        if (!best || d < best_d || (d == best_d && (f > best_f || (f == best_f && cand < *best)))) {
          best = &cand;
          best_d = d;
          best_f = f;
        }
      }
    }
    return best ? *best : word;
  }

  std::string restore(const std::string& text) const override {
    Tokens toks = tokenize(text);
    bool changed = false;
    for (auto& t : toks) {
      auto c = correct_word(t);
      if (c != t) {
        t = std::move(c);
        changed = true;
      }
    }
    return changed ? detokenize(toks) : text;
  }

  const KnownWords& words() const { return words_; }

 private:
  KnownWords words_;
  std::size_t max_distance_;
  std::map<std::size_t, std::vector<std::string>> by_length_;
};

}  // namespace textshield

#endif  // TEXTSHIELD_SPELLING_HPP_
