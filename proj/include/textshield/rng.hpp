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

#ifndef TEXTSHIELD_RNG_HPP_
#define TEXTSHIELD_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <utility>
#include <vector>

#include "textshield/text.hpp"

namespace textshield {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Counter-based keyed random stream. The key is derived from the root seed
// and a path of integers (example index, iteration, ...); draw i is a pure
// function of (key, i), so equal (root_seed, path) pairs give equal
// sequences on every platform. Distribution helpers avoid <random>
// distributions, whose outputs are implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t root_seed = 0, std::vector<std::uint64_t> path = {})
      : root_seed_(root_seed), path_(std::move(path)) {
    key_ = detail::mix64(root_seed_ + 0x9E3779B97F4A7C15ULL);
    for (auto p : path_) key_ = detail::mix64(key_ ^ detail::mix64(p + 0xD1B54A32D192ED03ULL));
  }

  std::uint64_t root_seed() const { return root_seed_; }
  const std::vector<std::uint64_t>& path() const { return path_; }
  std::uint64_t draws() const { return counter_; }

  RngStream child(std::uint64_t index) const {
    auto p = path_;
    p.push_back(index);
    return RngStream(root_seed_, std::move(p));
  }
  RngStream child(std::initializer_list<std::uint64_t> indices) const {
    auto p = path_;
    p.insert(p.end(), indices);
    return RngStream(root_seed_, std::move(p));
  }
  RngStream child(std::string_view label) const { return child(fnv1a64(label)); }

  std::uint64_t next_u64() {
    ++counter_;
    return detail::mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  // Uniform integer in [0, n). Rejection sampling keeps it unbiased.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // Uniform real in [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller using std::log/std::cos, which are
  // correctly rounded enough on IEEE platforms for our reproducibility needs.
  double normal() {
    double u1 = uniform01();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct indices from [0, n), in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    if (k > n) k = n;
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<std::size_t>(uniform_int(n - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
  }

 private:
  std::uint64_t root_seed_;
  std::vector<std::uint64_t> path_;
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace textshield

#endif  // TEXTSHIELD_RNG_HPP_
