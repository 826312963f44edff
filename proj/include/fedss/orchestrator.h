// Copyright 2026 The fedss Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FEDSS_ORCHESTRATOR_H_
#define FEDSS_ORCHESTRATOR_H_

#include <algorithm>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fedss/device_model.h"
#include "fedss/errors.h"

namespace fedss {

// Fixed set of worker threads draining a FIFO task queue.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t threads = 0);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  void Submit(std::function<void()> task);
  std::size_t size() const { return workers_.size(); }

 private:
  void Run(std::stop_token stop);

  std::mutex mu_;
  std::condition_variable_any cv_;
  std::deque<std::function<void()>> tasks_;
  std::vector<std::jthread> workers_;
};

// What a worker hands back: its payload plus how long the round took for
// that client in simulated seconds.
template <class R>
struct WorkOutcome {
  R value;
  double simulated_seconds = 0.0;
};

template <class R>
struct Completed {
  ClientId client;
  R value;
  double simulated_seconds = 0.0;
};

// Ack counter for one round. Each worker delivers into its own slot and bumps
// `acked` by one; the waiting coordinator wakes exactly once, when acked
// reaches the target.
template <class R>
class RoundBarrier {
 public:
  struct Slot {
    std::optional<WorkOutcome<R>> outcome;
    std::string error;  // non-empty when the work function threw
  };

  explicit RoundBarrier(std::size_t target) : target_(target), slots_(target) {
    if (target == 0) throw ConfigError("a round needs at least one client");
  }

  void Deliver(std::size_t slot, Slot result) {
    std::lock_guard lock(mu_);
    if (slot >= target_ || delivered_[slot]) {
      throw std::logic_error("duplicate or out-of-range delivery");
    }
    slots_[slot] = std::move(result);
    delivered_[slot] = true;
    ++acked_;
    if (acked_ == target_) {
      ++fired_;
      cv_.notify_all();
    }
  }

  void Wait() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return acked_ == target_; });
  }

  std::size_t target() const { return target_; }
  std::size_t acked() const {
    std::lock_guard lock(mu_);
    return acked_;
  }
  std::size_t times_fired() const {
    std::lock_guard lock(mu_);
    return fired_;
  }

  // Only valid after Wait() returns.
  std::vector<Slot> Take() {
    std::lock_guard lock(mu_);
    return std::move(slots_);
  }

 private:
  const std::size_t target_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::size_t acked_ = 0;
  std::size_t fired_ = 0;
  std::vector<Slot> slots_;
  std::vector<bool> delivered_ = std::vector<bool>(target_, false);
};

// In-process stand-in for the server's coordinator thread: sends work to the
// selected clients asynchronously and blocks until every one has acked.
// Results always come back in ascending client id, whatever the completion
// order.
class Coordinator {
 public:
  explicit Coordinator(std::size_t threads = 0) : pool_(threads) {}

  template <class R>
  using Work = std::function<WorkOutcome<R>(ClientId)>;

  // All clients must succeed; otherwise throws RoundFailure naming the
  // lowest failing id and nothing is returned.
  template <class R>
  std::vector<Completed<R>> DispatchRound(std::span<const ClientId> clients,
                                          const Work<R>& work) {
    auto done = RunAll<R>(clients, work);
    std::vector<Completed<R>> out;
    out.reserve(done.size());
    for (auto& [id, slot] : done) {
      if (!slot.outcome) throw RoundFailure(id.value, slot.error);
      out.push_back({id, std::move(slot.outcome->value),
                     slot.outcome->simulated_seconds});
    }
    return out;
  }

  // Over-selection: runs every invited client and keeps the `keep` that
  // finish first in simulated time (ties by id). Failed clients never finish.
  template <class R>
  std::vector<Completed<R>> DispatchFirstK(std::span<const ClientId> invited,
                                           std::size_t keep,
                                           const Work<R>& work) {
    if (keep == 0 || keep > invited.size()) {
      throw ConfigError("cannot keep " + std::to_string(keep) + " of " +
                        std::to_string(invited.size()) + " invited clients");
    }
    auto done = RunAll<R>(invited, work);
    std::vector<Completed<R>> ok;
    ClientId first_failed{0};
    std::string first_error;
    for (auto& [id, slot] : done) {
      if (slot.outcome) {
        ok.push_back({id, std::move(slot.outcome->value),
                      slot.outcome->simulated_seconds});
      } else if (first_error.empty()) {
        first_failed = id;
        first_error = slot.error.empty() ? "unknown error" : slot.error;
      }
    }
    if (ok.size() < keep) throw RoundFailure(first_failed.value, first_error);
    std::stable_sort(ok.begin(), ok.end(), [](const auto& a, const auto& b) {
      if (a.simulated_seconds != b.simulated_seconds) {
        return a.simulated_seconds < b.simulated_seconds;
      }
      return a.client < b.client;
    });
    ok.resize(keep);
    std::sort(ok.begin(), ok.end(),
              [](const auto& a, const auto& b) { return a.client < b.client; });
    return ok;
  }

  std::size_t threads() const { return pool_.size(); }

 private:
  template <class R>
  std::vector<std::pair<ClientId, typename RoundBarrier<R>::Slot>> RunAll(
      std::span<const ClientId> clients, const Work<R>& work) {
    std::vector<ClientId> ids(clients.begin(), clients.end());
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
      throw ConfigError("a client was dispatched twice in one round");
    }
    RoundBarrier<R> barrier(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      pool_.Submit([&barrier, &work, id = ids[i], i] {
        typename RoundBarrier<R>::Slot slot;
        try {
          slot.outcome = work(id);
        } catch (const std::exception& e) {
          slot.error = e.what();
          if (slot.error.empty()) slot.error = "unknown error";
        } catch (...) {
          slot.error = "unknown error";
        }
        barrier.Deliver(i, std::move(slot));
      });
    }
    barrier.Wait();
    auto slots = barrier.Take();
    std::vector<std::pair<ClientId, typename RoundBarrier<R>::Slot>> out;
    out.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      out.emplace_back(ids[i], std::move(slots[i]));
    }
    return out;
  }

  WorkerPool pool_;
};

}  // namespace fedss

#endif  // FEDSS_ORCHESTRATOR_H_
