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

// Scripted victims, hooks and fixtures shared by the test suites.

#ifndef TEXTSHIELD_TESTS_TEST_SUPPORT_HPP_
#define TEXTSHIELD_TESTS_TEST_SUPPORT_HPP_

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "textshield/attacks.hpp"
#include "textshield/constraints.hpp"
#include "textshield/endpoint.hpp"
#include "textshield/lexicon.hpp"
#include "textshield/paraphraser.hpp"
#include "textshield/semantic.hpp"
#include "textshield/suggester.hpp"

namespace textshield::testing {

inline const std::vector<std::string> kLabels{"negative", "positive"};

// Predicts "positive" with probability 0.9 when any trigger word is present,
// 0.1 otherwise.
inline std::shared_ptr<FunctionEndpoint> keyword_victim(std::set<std::string> triggers) {
  return std::make_shared<FunctionEndpoint>(kLabels, [triggers](const Query& q) {
    for (const auto& t : tokenize(q.text))
      if (triggers.count(t)) return ScoreVector{0.1, 0.9};
    return ScoreVector{0.9, 0.1};
  });
}

inline std::shared_ptr<FunctionEndpoint> constant_victim(ScoreVector s) {
  return std::make_shared<FunctionEndpoint>(kLabels, [s](const Query&) { return s; });
}

inline TextExample example(std::string text, std::string label = "positive", std::string id = "ex") {
  return TextExample{std::move(id), std::nullopt, std::move(text), std::move(label)};
}

inline Dataset dataset_of(const std::vector<std::pair<std::string, std::string>>& rows, std::string name = "toy") {
  Dataset ds;
  ds.name = std::move(name);
  ds.label_set = kLabels;
  for (std::size_t i = 0; i < rows.size(); ++i)
    ds.examples.push_back(example(rows[i].first, rows[i].second, ds.name + "-" + std::to_string(i)));
  return ds;
}

// Embedding by lookup; unknown texts embed to a fixed unit vector.
class ScriptedEncoder : public SemanticEncoder {
 public:
  explicit ScriptedEncoder(std::map<std::string, std::vector<double>> table) : table_(std::move(table)) {}
  std::vector<double> embed(const std::string& text) const override {
    auto it = table_.find(text);
    return it == table_.end() ? std::vector<double>{1.0, 0.0} : it->second;
  }

 private:
  std::map<std::string, std::vector<double>> table_;
};

// Embeds texts so that semantic_similarity(base, other) == sim for listed
// pairs: base maps to e1, other to (sim, sqrt(1 - sim^2)).
inline std::vector<double> at_similarity(double sim) { return {sim, std::sqrt(1.0 - sim * sim)}; }

class ScriptedScorer : public AnomalyScorer {
 public:
  explicit ScriptedScorer(std::function<double(const std::string&)> fn) : fn_(std::move(fn)) {}
  double degree(const Query& q) const override {
    ++calls;
    return fn_(q.text);
  }
  mutable std::size_t calls = 0;

 private:
  std::function<double(const std::string&)> fn_;
};

class ScriptedSuggester : public FillInSuggester {
 public:
  explicit ScriptedSuggester(std::vector<std::string> out) : out_(std::move(out)) {}
  std::vector<std::string> suggest(const Tokens&, const Tokens&, std::size_t k) const override {
    std::vector<std::string> r = out_;
    if (r.size() > k) r.resize(k);
    return r;
  }

 private:
  std::vector<std::string> out_;
};

class ScriptedParaphraser : public Paraphraser {
 public:
  explicit ScriptedParaphraser(std::vector<std::string> out) : out_(std::move(out)) {}
  std::vector<std::string> paraphrase(const std::string&, std::size_t count) const override {
    std::vector<std::string> r = out_;
    if (r.size() > count) r.resize(count);
    return r;
  }

 private:
  std::vector<std::string> out_;
};

// Counts every call into the wrapped endpoint.
class CountingEndpoint : public Endpoint {
 public:
  explicit CountingEndpoint(Endpoint& inner) : inner_(inner) {}
  ScoreVector query(const Query& q) override {
    ++calls;
    return inner_.query(q);
  }
  std::uint64_t query_count() const override { return calls; }
  const std::vector<std::string>& label_set() const override { return inner_.label_set(); }
  std::uint64_t calls = 0;

 private:
  Endpoint& inner_;
};

inline std::string random_word(std::mt19937_64& g, std::size_t min_len, std::size_t max_len, const char* alphabet = "abcde") {
  const std::string a = alphabet;
  std::uniform_int_distribution<std::size_t> len(min_len, max_len), ch(0, a.size() - 1);
  std::string s(len(g), ' ');
  for (auto& c : s) c = a[ch(g)];
  return s;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("textshield-" + tag + "-" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace textshield::testing

#endif  // TEXTSHIELD_TESTS_TEST_SUPPORT_HPP_
