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

#ifndef TEXTSHIELD_LANGUAGE_MODEL_HPP_
#define TEXTSHIELD_LANGUAGE_MODEL_HPP_

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "textshield/lexicon.hpp"
#include "textshield/text.hpp"

namespace textshield {

// Fluency hook: perplexity of a text. Implementations throw on empty text.
class FluencyScorer {
 public:
  virtual ~FluencyScorer() = default;
  virtual double perplexity(const std::string& text) const = 0;
};

// Grammar hook: number of grammatical errors in a text, or nullopt when the
// checker cannot score it.
class GrammarChecker {
 public:
  virtual ~GrammarChecker() = default;
  virtual std::optional<int> count_errors(const std::string& text) const = 0;
};

// Add-one smoothed n-gram model (order 1 or 2) over word tokens.
class NgramLanguageModel : public FluencyScorer {
 public:
  static constexpr const char* kStart = "<s>";

  explicit NgramLanguageModel(int order = 2) : order_(order) {
    if (order < 1 || order > 2) throw Error("NgramLanguageModel supports order 1 or 2");
  }

  // Declares vocabulary without observing counts.
  void add_vocabulary(const std::string& word) { vocab_.insert(word); }

  void observe(const std::string& text) {
    const Tokens toks = tokenize(text);
    std::string prev = kStart;
    for (const auto& t : toks) {
      vocab_.insert(t);
      ++unigram_[t];
      ++total_;
      ++history_[prev];
      ++bigram_[prev + '\x1f' + t];
      prev = t;
    }
  }

  std::size_t vocabulary_size() const { return std::max<std::size_t>(vocab_.size(), 1); }
  const std::set<std::string>& vocabulary() const { return vocab_; }
  int order() const { return order_; }

  std::uint64_t unigram_count(const std::string& w) const { return lookup(unigram_, w); }
  std::uint64_t bigram_count(const std::string& prev, const std::string& w) const {
    return lookup(bigram_, prev + '\x1f' + w);
  }

  double prob(const std::string& prev, const std::string& w) const {
    const double v = static_cast<double>(vocabulary_size());
    if (order_ == 1) return (static_cast<double>(lookup(unigram_, w)) + 1.0) / (static_cast<double>(total_) + v);
    return (static_cast<double>(bigram_count(prev, w)) + 1.0) / (static_cast<double>(lookup(history_, prev)) + v);
  }

  double log_prob(const Tokens& toks) const {
    double lp = 0.0;
    std::string prev = kStart;
    for (const auto& t : toks) {
      lp += std::log(prob(prev, t));
      prev = t;
    }
    return lp;
  }

  double perplexity(const std::string& text) const override {
    const Tokens toks = tokenize(text);
    if (toks.empty()) throw Error("perplexity: empty text");
    return std::exp(-log_prob(toks) / static_cast<double>(toks.size()));
  }

 private:
  static std::uint64_t lookup(const std::unordered_map<std::string, std::uint64_t>& m, const std::string& k) {
    auto it = m.find(k);
    return it == m.end() ? 0 : it->second;
  }

  int order_;
  std::set<std::string> vocab_;
  std::unordered_map<std::string, std::uint64_t> unigram_, history_, bigram_;
  std::uint64_t total_ = 0;
};

inline double perplexity(const FluencyScorer* scorer, const std::string& text) {
  if (!scorer) throw Error("perplexity: no fluency scorer configured");
  return scorer->perplexity(text);
}

// Desk grammar checker: every word token missing from the known-word list
// counts as one error.
class LexiconGrammarChecker : public GrammarChecker {
 public:
  explicit LexiconGrammarChecker(KnownWords words) : words_(std::move(words)) {}
  std::optional<int> count_errors(const std::string& text) const override {
    int errors = 0;
    for (const auto& t : tokenize(text))
      if (!is_punct_token(t) && !words_.contains(t)) ++errors;
    return errors;
  }

 private:
  KnownWords words_;
};

// errors(adversarial) - errors(original); nullopt when the checker is missing
// or cannot score either text.
inline std::optional<int> grammar_error_increase(const GrammarChecker* checker, const std::string& original,
                                                 const std::string& adversarial) {
  if (!checker) return std::nullopt;
  const auto a = checker->count_errors(original);
  const auto b = checker->count_errors(adversarial);
  if (!a || !b) return std::nullopt;
  return *b - *a;
}

}  // namespace textshield

#endif  // TEXTSHIELD_LANGUAGE_MODEL_HPP_
