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

#ifndef TEXTSHIELD_ENDPOINT_HPP_
#define TEXTSHIELD_ENDPOINT_HPP_

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "textshield/classifier.hpp"

namespace textshield {

enum class OutputMode { score, label };

// Black-box query surface the attacks talk to. Every call to query() is one
// query; label-mode endpoints expose only a one-hot of the argmax.
class Endpoint {
 public:
  virtual ~Endpoint() = default;
  virtual ScoreVector query(const Query& q) = 0;
  virtual std::uint64_t query_count() const = 0;
  virtual const std::vector<std::string>& label_set() const = 0;

  std::size_t query_label(const Query& q) { return argmax(query(q)); }

  // False when repeated queries on one input may disagree (randomized
  // defenses).
  virtual bool deterministic() const { return true; }
  // Underlying victim queries consumed by one call.
  virtual std::uint64_t queries_per_call() const { return 1; }
  // Rebases any internal randomness on the example index so outputs do not
  // depend on the order in which examples are attacked.
  virtual void begin_example(std::uint64_t /*index*/) {}
};

inline ScoreVector one_hot(std::size_t n, std::size_t k) {
  ScoreVector v(n, 0.0);
  v[k] = 1.0;
  return v;
}

// Endpoint over a trained classifier with a linearizable query counter.
class ClassifierEndpoint : public Endpoint {
 public:
  explicit ClassifierEndpoint(std::shared_ptr<const ClassifierModel> model, OutputMode mode = OutputMode::score)
      : model_(std::move(model)), mode_(mode) {}

  ScoreVector query(const Query& q) override {
    count_.fetch_add(1, std::memory_order_relaxed);
    ScoreVector s = model_->predict(q);
    return mode_ == OutputMode::score ? s : one_hot(s.size(), argmax(s));
  }
  std::uint64_t query_count() const override { return count_.load(std::memory_order_relaxed); }
  const std::vector<std::string>& label_set() const override { return model_->label_set(); }

  OutputMode output_mode() const { return mode_; }
  const ClassifierModel& model() const { return *model_; }
  std::shared_ptr<const ClassifierModel> model_ptr() const { return model_; }

 private:
  std::shared_ptr<const ClassifierModel> model_;
  OutputMode mode_;
  std::atomic<std::uint64_t> count_{0};
};

// Endpoint backed by an arbitrary scoring function; used for scripted
// victims in tests and for plugging external models.
class FunctionEndpoint : public Endpoint {
 public:
  using ScoreFn = std::function<ScoreVector(const Query&)>;
  FunctionEndpoint(std::vector<std::string> labels, ScoreFn fn) : labels_(std::move(labels)), fn_(std::move(fn)) {}

  ScoreVector query(const Query& q) override {
    count_.fetch_add(1, std::memory_order_relaxed);
    return fn_(q);
  }
  std::uint64_t query_count() const override { return count_.load(std::memory_order_relaxed); }
  const std::vector<std::string>& label_set() const override { return labels_; }

 private:
  std::vector<std::string> labels_;
  ScoreFn fn_;
  std::atomic<std::uint64_t> count_{0};
};

// Per-attack accounting wrapper: counts victim queries (scaled by the inner
// endpoint's queries_per_call) and refuses to exceed a budget.
class BudgetedEndpoint {
 public:
  BudgetedEndpoint(Endpoint& inner, std::uint64_t budget) : inner_(inner), budget_(budget) {}

  bool can_query() const { return used_ + inner_.queries_per_call() <= budget_; }
  std::uint64_t used() const { return used_; }
  std::uint64_t budget() const { return budget_; }
  Endpoint& inner() { return inner_; }

  ScoreVector query(const Query& q) {
    if (!can_query()) throw Error("query budget exhausted");
    used_ += inner_.queries_per_call();
    return inner_.query(q);
  }

 private:
  Endpoint& inner_;
  std::uint64_t budget_;
  std::uint64_t used_ = 0;
};

}  // namespace textshield

#endif  // TEXTSHIELD_ENDPOINT_HPP_
