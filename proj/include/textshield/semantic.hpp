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

#ifndef TEXTSHIELD_SEMANTIC_HPP_
#define TEXTSHIELD_SEMANTIC_HPP_

#include <cmath>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "textshield/distance.hpp"
#include "textshield/lexicon.hpp"
#include "textshield/rng.hpp"

namespace textshield {

class SemanticEncoder {
 public:
  virtual ~SemanticEncoder() = default;
  virtual std::vector<double> embed(const std::string& text) const = 0;
};

// Cosine similarity of two texts under an encoder; 0 when either embedding
// is the zero vector.
inline double semantic_similarity(const SemanticEncoder& enc, const std::string& a, const std::string& b) {
  const auto x = enc.embed(a), y = enc.embed(b);
  auto zero = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double d) { return d == 0.0; });
  };
  if (zero(x) || zero(y)) return 0.0;
  return cosine_similarity(x, y);
}

// Mean of static word vectors with smooth-inverse-frequency weighting.
//
// Word vectors are synthesized deterministically: words connected in the
// synonym lexicon share a group direction, and every word adds its own
// hashed component. Synonyms therefore land close together while unrelated
// and misspelled words are near-orthogonal.
class StaticWordVectorEncoder : public SemanticEncoder {
 public:
  StaticWordVectorEncoder(const SynonymLexicon& lexicon, FrequencyTable freq, std::size_t dim = 64,
                          std::uint64_t seed = 0x5E3A, double own_weight = 0.35, double sif_a = 1e-3)
      : freq_(std::move(freq)), dim_(dim), seed_(seed), own_weight_(own_weight), sif_a_(sif_a) {
    // Union-find over the synonym graph; the group id is the smallest member.
    std::map<std::string, std::string> parent;
    auto find = [&](std::string w) {
      while (parent.at(w) != w) w = parent.at(w);
      return w;
    };
    auto touch = [&](const std::string& w) { parent.try_emplace(w, w); };
    for (const auto& [w, syns] : lexicon.table()) {
      touch(w);
      for (const auto& s : syns) {
        touch(s);
        auto a = find(w), b = find(s);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
    for (const auto& [w, p] : parent) group_[w] = find(w);
    for (const auto& [w, g] : group_) cache_.emplace(w, compute_vector(w));
    for (const auto& [w, c] : freq_.counts()) cache_.try_emplace(w, compute_vector(w));
  }

  std::size_t dimension() const { return dim_; }

  std::vector<double> word_vector(const std::string& word) const {
    auto hit = cache_.find(word);
    return hit != cache_.end() ? hit->second : compute_vector(word);
  }

  double word_weight(const std::string& word) const {
    if (freq_.total() == 0) return 1.0;
    const double p = static_cast<double>(freq_.count(word)) / static_cast<double>(freq_.total());
    return sif_a_ / (sif_a_ + p);
  }

  std::vector<double> embed(const std::string& text) const override {
    std::vector<double> out(dim_, 0.0);
    const Tokens toks = tokenize(text);
    for (const auto& t : toks) {
      const auto v = word_vector(t);
      const double w = word_weight(t);
      for (std::size_t i = 0; i < dim_; ++i) out[i] += w * v[i];
    }
    if (!toks.empty())
      for (double& d : out) d /= static_cast<double>(toks.size());
    return out;
  }

  double word_similarity(const std::string& a, const std::string& b) const {
    return cosine_similarity(word_vector(a), word_vector(b));
  }

 private:
  std::vector<double> compute_vector(const std::string& word) const {
    std::vector<double> v(dim_, 0.0);
    auto it = group_.find(word);
    const double own = it == group_.end() ? 1.0 : own_weight_;
    if (it != group_.end()) add_gaussian(v, "group:" + it->second, 1.0);
    add_gaussian(v, "word:" + word, own);
    double n = 0;
    for (double d : v) n += d * d;
    n = std::sqrt(n);
    for (double& d : v) d /= n;
    return v;
  }

  void add_gaussian(std::vector<double>& v, const std::string& key, double scale) const {
    RngStream rng(seed_, {fnv1a64(key)});
    for (double& d : v) d += scale * rng.normal();
  }

  FrequencyTable freq_;
  std::map<std::string, std::string> group_;
  std::unordered_map<std::string, std::vector<double>> cache_;
  std::size_t dim_;
  std::uint64_t seed_;
  double own_weight_;
  double sif_a_;
};

}  // namespace textshield

#endif  // TEXTSHIELD_SEMANTIC_HPP_
