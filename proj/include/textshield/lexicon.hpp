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

#ifndef TEXTSHIELD_LEXICON_HPP_
#define TEXTSHIELD_LEXICON_HPP_

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "textshield/types.hpp"

namespace textshield {

// word -> ordered synonym list. File format: `word<TAB>syn1,syn2,...`.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;

  void add(const std::string& word, std::vector<std::string> synonyms) {
    auto& dst = table_[word];
    for (auto& s : synonyms)
      if (s != word && std::find(dst.begin(), dst.end(), s) == dst.end()) dst.push_back(std::move(s));
  }

  const std::vector<std::string>& synonyms(const std::string& word) const {
    static const std::vector<std::string> kEmpty;
    auto it = table_.find(word);
    return it == table_.end() ? kEmpty : it->second;
  }
  bool has_synonyms(const std::string& word) const { return !synonyms(word).empty(); }
  bool contains(const std::string& word, const std::string& candidate) const {
    const auto& s = synonyms(word);
    return std::find(s.begin(), s.end(), candidate) != s.end();
  }
  std::size_t size() const { return table_.size(); }
  const std::map<std::string, std::vector<std::string>>& table() const { return table_; }

  static SynonymLexicon load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open synonym lexicon " + path.string());
    SynonymLexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (trim(line).empty()) continue;
      auto cols = split(line, '\t');
      if (cols.size() != 2) throw Error(path.string() + ":" + std::to_string(lineno) + ": expected word<TAB>synonyms");
      std::vector<std::string> syns;
      for (auto& s : split(cols[1], ',')) {
        auto t = trim(s);
        if (!t.empty()) syns.push_back(t);
      }
      lex.add(trim(cols[0]), std::move(syns));
    }
    return lex;
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& [w, syns] : table_) {
      out << w << '\t';
      for (std::size_t i = 0; i < syns.size(); ++i) out << (i ? "," : "") << syns[i];
      out << '\n';
    }
  }

 private:
  std::map<std::string, std::vector<std::string>> table_;
};

// One entry per line (neutral adverbs, known-word lists).
inline std::vector<std::string> load_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open word list " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (!t.empty()) words.push_back(std::move(t));
  }
  return words;
}

inline void save_word_list(const std::vector<std::string>& words, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& w : words) out << w << '\n';
}

// `word<TAB>tag` part-of-speech lexicon.
class PosLexicon {
 public:
  void add(const std::string& word, const std::string& tag) { tags_[word] = tag; }
  std::string tag(const std::string& word) const {
    auto it = tags_.find(word);
    return it == tags_.end() ? std::string("X") : it->second;
  }
  std::size_t size() const { return tags_.size(); }
  const std::map<std::string, std::string>& table() const { return tags_; }

  static PosLexicon load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open POS lexicon " + path.string());
    PosLexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (trim(line).empty()) continue;
      auto cols = split(line, '\t');
      if (cols.size() != 2) throw Error(path.string() + ":" + std::to_string(lineno) + ": expected word<TAB>tag");
      lex.add(trim(cols[0]), trim(cols[1]));
    }
    return lex;
  }
  void save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& [w, t] : tags_) out << w << '\t' << t << '\n';
  }

 private:
  std::map<std::string, std::string> tags_;
};

// Token counts over a corpus.
class FrequencyTable {
 public:
  void add_text(const std::string& text) {
    for (auto& t : tokenize(text)) {
      ++counts_[t];
      ++total_;
    }
  }
  void add(const std::string& token, std::uint64_t n = 1) {
    counts_[token] += n;
    total_ += n;
  }
  std::uint64_t count(const std::string& token) const {
    auto it = counts_.find(token);
    return it == counts_.end() ? 0 : it->second;
  }
  std::uint64_t total() const { return total_; }
  const std::map<std::string, std::uint64_t>& counts() const { return counts_; }

  static FrequencyTable from_dataset(const Dataset& ds) {
    FrequencyTable f;
    for (const auto& ex : ds.examples) {
      if (ex.premise) f.add_text(*ex.premise);
      f.add_text(ex.text);
    }
    return f;
  }

 private:
  std::map<std::string, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

// The set of known words: used by spelling restoration and the desk grammar
// checker. Frequencies break ties during restoration.
class KnownWords {
 public:
  KnownWords() = default;
  KnownWords(const FrequencyTable& freq, const SynonymLexicon* synonyms = nullptr,
             const std::vector<std::string>* extra = nullptr) {
    for (const auto& [w, c] : freq.counts()) add(w, c);
    if (synonyms)
      for (const auto& [w, syns] : synonyms->table()) {
        add(w, 0);
        for (const auto& s : syns) add(s, 0);
      }
    if (extra)
      for (const auto& w : *extra) add(w, 0);
  }

  void add(const std::string& word, std::uint64_t freq) {
    auto [it, inserted] = freq_.try_emplace(word, freq);
    if (!inserted) it->second = std::max(it->second, freq);
  }
  bool contains(const std::string& w) const { return freq_.count(w) > 0; }
  std::uint64_t frequency(const std::string& w) const {
    auto it = freq_.find(w);
    return it == freq_.end() ? 0 : it->second;
  }
  std::size_t size() const { return freq_.size(); }
  const std::map<std::string, std::uint64_t>& words() const { return freq_; }

 private:
  std::map<std::string, std::uint64_t> freq_;
};

}  // namespace textshield

#endif  // TEXTSHIELD_LEXICON_HPP_
