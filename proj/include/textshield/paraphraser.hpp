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

#ifndef TEXTSHIELD_PARAPHRASER_HPP_
#define TEXTSHIELD_PARAPHRASER_HPP_

#include <algorithm>
#include <string>
#include <vector>

#include "textshield/lexicon.hpp"
#include "textshield/rng.hpp"

namespace textshield {

// Sentence-level rewriting hook (round-trip translation, syntactic
// paraphrase models). Returns up to `count` candidates, best first.
class Paraphraser {
 public:
  virtual ~Paraphraser() = default;
  virtual std::vector<std::string> paraphrase(const std::string& text, std::size_t count) const = 0;
};

class IdentityParaphraser : public Paraphraser {
 public:
  std::vector<std::string> paraphrase(const std::string& text, std::size_t count) const override {
    return count ? std::vector<std::string>{text} : std::vector<std::string>{};
  }
};

// Rule-based stand-in for round-trip translation.
//
// Candidate 0 maps every synonym-bearing word to the most frequent member of
// its synonym set, the way a translation round trip tends to normalize word
// choice. Later candidates re-draw synonyms for a share of the content words
// and may swap the two halves of a ", and" coordination or drop a leading
// "<word> ," opener.
class DeskParaphraser : public Paraphraser {
 public:
  DeskParaphraser(SynonymLexicon lexicon, FrequencyTable freq, std::uint64_t seed = 11, double redraw_prob = 0.35)
      : lexicon_(std::move(lexicon)), freq_(std::move(freq)), seed_(seed), redraw_prob_(redraw_prob) {}

  std::vector<std::string> paraphrase(const std::string& text, std::size_t count) const override {
    std::vector<std::string> out;
    const Tokens toks = tokenize(text);
    const std::string norm = detokenize(toks);
    auto push = [&](Tokens t) {
      auto s = detokenize(t);
      if (s != norm && !s.empty() && std::find(out.begin(), out.end(), s) == out.end()) out.push_back(std::move(s));
    };
    if (count == 0) return out;
    push(canonical(toks));
    const RngStream root(seed_, {fnv1a64(norm)});
    for (std::uint64_t j = 1; out.size() < count && j <= 4 * count; ++j) {
      RngStream rng = root.child(j);
      Tokens t = toks;
      for (auto& w : t) {
        const auto& syns = lexicon_.synonyms(w);
        if (syns.empty() || is_stopword(w)) continue;
        if (rng.bernoulli(redraw_prob_)) w = syns[rng.uniform_int(syns.size())];
      }
      if (rng.bernoulli(0.5)) swap_coordination(t);
      if (rng.bernoulli(0.5) && t.size() > 3 && t[1] == "," && !is_punct_token(t[0])) t.erase(t.begin(), t.begin() + 2);
      push(std::move(t));
    }
    if (out.size() > count) out.resize(count);
    return out;
  }

 private:
  Tokens canonical(Tokens t) const {
    for (auto& w : t) {
      const auto& syns = lexicon_.synonyms(w);
      if (syns.empty() || is_stopword(w)) continue;
      std::string best = w;
      std::uint64_t best_f = freq_.count(w);
      for (const auto& s : syns) {
        const auto f = freq_.count(s);
        if (f > best_f || (f == best_f && s < best)) {
          best = s;
          best_f = f;
        }
      }
      w = best;
    }
    return t;
  }

  // "A , and B ." -> "B , and A ."
  static void swap_coordination(Tokens& t) {
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      if (t[i] == "," && t[i + 1] == "and") {
        std::size_t end = t.size();
        if (end > 0 && is_punct_token(t[end - 1])) --end;
        if (i + 2 >= end) return;
        Tokens a(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(i));
        Tokens b(t.begin() + static_cast<std::ptrdiff_t>(i + 2), t.begin() + static_cast<std::ptrdiff_t>(end));
        Tokens tail(t.begin() + static_cast<std::ptrdiff_t>(end), t.end());
        Tokens r = b;
        r.push_back(",");
        r.push_back("and");
        r.insert(r.end(), a.begin(), a.end());
        r.insert(r.end(), tail.begin(), tail.end());
        t = std::move(r);
        return;
      }
    }
  }

  SynonymLexicon lexicon_;
  FrequencyTable freq_;
  std::uint64_t seed_;
  double redraw_prob_;
};

}  // namespace textshield

#endif  // TEXTSHIELD_PARAPHRASER_HPP_
