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

#ifndef TEXTSHIELD_TEXT_HPP_
#define TEXTSHIELD_TEXT_HPP_

#include <cctype>
#include <cstdint>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace textshield {

// Base error for everything the library throws on contract violations.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Tokens = std::vector<std::string>;

// Warning sink; defaults to stderr. Tests swap it to capture messages.
inline std::function<void(const std::string&)>& warning_sink() {
  static std::function<void(const std::string&)> sink = [](const std::string& msg) {
    std::cerr << "[textshield] warning: " << msg << '\n';
  };
  return sink;
}

inline void log_warning(const std::string& msg) {
  if (warning_sink()) warning_sink()(msg);
}

inline bool is_punct_char(unsigned char c) {
  return c < 0x80 && std::ispunct(c) && c != '\'';
}

// Whitespace-plus-punctuation word tokenizer shared by every module.
// Apostrophes stay inside words ("don't"); every other ASCII punctuation
// character becomes its own token.
inline Tokens tokenize(std::string_view text) {
  Tokens out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isspace(c)) {
      flush();
    } else if (is_punct_char(c)) {
      flush();
      out.emplace_back(1, ch);
    } else {
      cur.push_back(ch);
    }
  }
  flush();
  return out;
}

inline std::string detokenize(const Tokens& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

inline bool is_punct_token(std::string_view token) {
  if (token.empty()) return false;
  for (char ch : token)
    if (!is_punct_char(static_cast<unsigned char>(ch))) return false;
  return true;
}

// Indices of tokens that are words (not pure punctuation).
inline std::vector<std::size_t> word_positions(const Tokens& tokens) {
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (!is_punct_token(tokens[i])) pos.push_back(i);
  return pos;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char delim) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == delim) {
      parts.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

// Decodes UTF-8 into code points. Invalid bytes decode as themselves so
// that distance computations stay total.
inline std::u32string utf8_decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    int len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 0;
    if (len <= 1 || i + len > s.size()) {
      out.push_back(c);
      ++i;
      continue;
    }
    char32_t cp = c & (0xFF >> (len + 1));
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc >> 6) != 0x2) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      out.push_back(c);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> words = {
      "a",     "an",    "the",   "and",  "or",    "but",   "if",    "of",    "to",   "in",
      "on",    "at",    "by",    "for",  "with",  "from",  "as",    "is",    "are",  "was",
      "were",  "be",    "been",  "it",   "its",   "this",  "that",  "these", "those", "i",
      "you",   "he",    "she",   "we",   "they",  "me",    "him",   "her",   "us",   "them",
      "my",    "your",  "his",   "our",  "their", "not",   "no",    "so",    "than", "too",
      "very",  "can",   "will",  "just", "do",    "does",  "did",   "has",   "have", "had",
      "there", "here",  "what",  "which", "who",  "whom",  "all",   "any",   "each", "some",
      "such",  "only",  "own",   "same", "then",  "once",  "about", "into",  "over", "after",
      "more",  "most",  "other", "up",   "down",  "out",   "off",   "again", "while", "because"};
  return words;
}

inline bool is_stopword(std::string_view w) { return stopwords().count(std::string(w)) > 0; }

// 64-bit FNV-1a; stable across platforms, used for digests and hashing
// features into buckets.
inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[i] = digits[v & 0xF];
  return out;
}

}  // namespace textshield

#endif  // TEXTSHIELD_TEXT_HPP_
