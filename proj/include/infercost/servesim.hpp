/* Copyright 2026 The infercost Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

// Discrete-event simulation of batch and online serving.
//
// A request's first output token comes out of its prefill; every further
// token costs one decode step. Output lengths are taken from the trace (no
// EOS sampling). Step durations come from the linear runtime model, so the
// simulation is fully deterministic for a given trace.
//
// Scheduling policies:
//   Static      wait for batch_size queued requests (or the end of the
//               trace), prefill them together, decode until the whole batch
//               finishes, repeat.
//   Continuous  at every step boundary admit queued requests; newly admitted
//               requests get one exclusive prefill step, then join the shared
//               decode batch. Finished requests leave immediately.
//   SplitFuse   every step carries up to token_budget tokens: one decode
//               token per running sequence, the rest filled with prompt
//               chunks. Step time is the prefill model at the fused size.
//
// Admission reserves each request's final cache footprint, so the KV budget
// holds at every event without preemption.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <future>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "infercost/arch.hpp"
#include "infercost/estimator.hpp"
#include "infercost/kvsim.hpp"
#include "infercost/workload.hpp"

namespace infercost {

struct StaticBatching {
  std::int64_t batch_size = 1;
};

struct ContinuousBatching {
  std::int64_t max_seqs = 256;
  // Prompt tokens allowed in one prefill step.
  std::int64_t max_batch_tokens = 4096;
};

struct SplitFuse {
  std::int64_t token_budget = 512;
  std::int64_t max_seqs = 256;
};

using SchedulingPolicy = std::variant<StaticBatching, ContinuousBatching, SplitFuse>;

inline std::string policy_name(const SchedulingPolicy& policy) {
  struct {
    std::string operator()(const StaticBatching&) const { return "static"; }
    std::string operator()(const ContinuousBatching&) const { return "continuous"; }
    std::string operator()(const SplitFuse&) const { return "splitfuse"; }
  } visitor;
  return std::visit(visitor, policy);
}

inline void validate_policy(const SchedulingPolicy& policy) {
  const auto require = [](std::int64_t v, const char* what) {
    if (v < 1) throw NonPositiveFieldError(std::string(what) + " must be >= 1");
  };
  if (const auto* p = std::get_if<StaticBatching>(&policy)) require(p->batch_size, "batch_size");
  if (const auto* p = std::get_if<ContinuousBatching>(&policy)) {
    require(p->max_seqs, "max_seqs");
    require(p->max_batch_tokens, "max_batch_tokens");
  }
  if (const auto* p = std::get_if<SplitFuse>(&policy)) {
    require(p->token_budget, "token_budget");
    require(p->max_seqs, "max_seqs");
  }
}

// Step durations for one architecture from fitted or published coefficients.
class StepTimer {
 public:
  StepTimer(ModelConfig cfg, std::optional<RegressionCoefficients> prefill,
            std::optional<RegressionCoefficients> decode)
      : cfg_(validate_config(cfg)), prefill_(std::move(prefill)), decode_(std::move(decode)) {
    if (!prefill_ || prefill_->phase != Phase::Prefill || prefill_->values.size() != coefficient_count(Phase::Prefill)) {
      throw MissingCoefficientsError("simulation needs prefill coefficients");
    }
    if (!decode_ || decode_->phase != Phase::Decode || decode_->values.size() != coefficient_count(Phase::Decode)) {
      throw MissingCoefficientsError("simulation needs decode coefficients");
    }
  }

  const ModelConfig& config() const { return cfg_; }

  // Seconds. Fitted models can go negative at tiny sizes (negative
  // intercept); such steps are clamped to zero duration.
  double prefill_s(std::int64_t batch, std::int64_t seq_len) const {
    return std::max(0.0, predict(*prefill_, cfg_, batch, seq_len)) * 1e-3;
  }
  double decode_s(std::int64_t batch, std::int64_t past_len) const {
    return std::max(0.0, predict(*decode_, cfg_, batch, past_len)) * 1e-3;
  }

 private:
  ModelConfig cfg_;
  std::optional<RegressionCoefficients> prefill_;
  std::optional<RegressionCoefficients> decode_;
};

struct KvCapacity {
  CacheLayout layout = CacheLayout::paged();
  std::uint64_t budget_bytes = std::numeric_limits<std::uint64_t>::max();
};

struct RequestRecord {
  std::int64_t id = 0;
  std::int64_t input_len = 0;
  std::int64_t output_len = 0;
  double arrival_s = 0.0;
  double first_token_s = 0.0;
  double completion_s = 0.0;

  double latency_s() const { return completion_s - arrival_s; }
  // Request latency spread over its output tokens.
  double token_latency_s() const { return latency_s() / static_cast<double>(output_len); }

  friend bool operator==(const RequestRecord&, const RequestRecord&) = default;
};

enum class StepKind { Prefill, Decode, Fused };

struct StepRecord {
  StepKind kind = StepKind::Decode;
  double start_s = 0.0;
  double duration_s = 0.0;
  std::int64_t batch = 0;            // sequences touched by the step
  std::int64_t tokens = 0;           // tokens processed (prompt + decode)
  std::int64_t generated = 0;        // output tokens produced at step end
  std::uint64_t kv_allocated_bytes = 0;  // after the step
  std::uint64_t kv_reserved_bytes = 0;
};

struct ServingMetrics {
  double token_throughput = 0.0;  // generated tokens / s
  double seq_throughput = 0.0;    // completed requests / s
  double mean_token_latency_s = 0.0;
  double p50_latency_s = 0.0;
  double p95_latency_s = 0.0;
  std::uint64_t completed = 0;

  friend bool operator==(const ServingMetrics&, const ServingMetrics&) = default;
};

struct SimulationResult {
  ServingMetrics metrics;
  std::vector<RequestRecord> records;  // ordered by completion time
  std::vector<StepRecord> steps;
  std::uint64_t generated_tokens = 0;
  std::uint64_t peak_kv_allocated_bytes = 0;
  double makespan_s = 0.0;
};

namespace detail {

// Linear-interpolated quantile of sorted data.
inline double quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

}  // namespace detail

/// Aggregates records; throughput is measured over [window_start_s, last
/// completion]. Without a window start the earliest arrival is used.
inline ServingMetrics compute_metrics(std::span<const RequestRecord> records,
                                      std::optional<double> window_start_s = std::nullopt) {
  ServingMetrics m;
  if (records.empty()) return m;
  double start = std::numeric_limits<double>::infinity();
  double end = -std::numeric_limits<double>::infinity();
  double tokens = 0.0;
  double token_latency_sum = 0.0;
  std::vector<double> latencies;
  latencies.reserve(records.size());
  for (const auto& r : records) {
    start = std::min(start, r.arrival_s);
    end = std::max(end, r.completion_s);
    tokens += static_cast<double>(r.output_len);
    token_latency_sum += r.token_latency_s();
    latencies.push_back(r.latency_s());
  }
  if (window_start_s) start = *window_start_s;
  std::sort(latencies.begin(), latencies.end());
  const double span = end - start;
  m.completed = records.size();
  if (span > 0.0) {
    m.token_throughput = tokens / span;
    m.seq_throughput = static_cast<double>(records.size()) / span;
  }
  m.mean_token_latency_s = token_latency_sum / static_cast<double>(records.size());
  m.p50_latency_s = detail::quantile(latencies, 0.50);
  m.p95_latency_s = detail::quantile(latencies, 0.95);
  return m;
}

namespace detail {

struct Sequence {
  std::size_t trace_index = 0;
  std::int64_t input_len = 0;
  std::int64_t output_len = 0;
  std::int64_t prompt_done = 0;  // prompt tokens already in the cache
  std::int64_t generated = 0;
  double first_token_s = 0.0;
  std::uint64_t reserved_bytes = 0;

  bool prefilled() const { return prompt_done == input_len; }
  bool finished() const { return generated == output_len; }
  // Tokens in the cache.
  std::int64_t cached() const { return prefilled() ? input_len + std::max<std::int64_t>(generated - 1, 0) : prompt_done; }
};

class Engine {
 public:
  Engine(const SchedulingPolicy& policy, std::span<const Request> trace, const StepTimer& timer,
         const KvCapacity& capacity)
      : policy_(policy), trace_(trace), timer_(timer), capacity_(capacity) {}

  SimulationResult run() {
    validate_policy(policy_);
    check_trace();
    while (true) {
      enqueue_arrivals();
      if (completed_ == trace_.size()) break;
      const bool worked = std::visit([this](const auto& p) { return step(p); }, policy_);
      if (!worked) {
        if (next_arrival_ >= trace_.size()) {
          throw Error("simulation stalled with " + std::to_string(queue_.size()) + " queued requests");
        }
        now_ = std::max(now_, trace_[next_arrival_].arrival_time_s);
      }
    }
    result_.metrics = compute_metrics(result_.records);
    result_.makespan_s = now_;
    return std::move(result_);
  }

 private:
  void check_trace() const {
    double last = 0.0;
    for (std::size_t i = 0; i < trace_.size(); ++i) {
      const auto& r = trace_[i];
      if (r.input_len < 1 || r.output_len < 1) {
        throw NonPositiveFieldError("request " + std::to_string(r.id) + " has a non-positive length");
      }
      if (!(r.arrival_time_s >= 0.0) || (i > 0 && r.arrival_time_s < last)) {
        throw Error("trace must be sorted by non-negative arrival time (request " + std::to_string(r.id) + ")");
      }
      last = r.arrival_time_s;
      if (reservation(r) > capacity_.budget_bytes) {
        throw CapacityInfeasibleError("request " + std::to_string(r.id) + " alone needs " +
                                      std::to_string(reservation(r)) + " B of KV cache, budget is " +
                                      std::to_string(capacity_.budget_bytes) + " B");
      }
      if (const auto* p = std::get_if<ContinuousBatching>(&policy_); p && r.input_len > p->max_batch_tokens) {
        throw CapacityInfeasibleError("request " + std::to_string(r.id) + " prompt of " +
                                      std::to_string(r.input_len) + " tokens exceeds max_batch_tokens");
      }
    }
  }

  // Final cache footprint: every prompt token plus every output token but
  // the last one.
  std::uint64_t reservation(const Request& r) const {
    const auto tokens = static_cast<std::uint64_t>(r.input_len + r.output_len - 1);
    try {
      return sequence_allocation_bytes(capacity_.layout, timer_.config(), tokens);
    } catch (const ReservedOverflowError& e) {
      throw CapacityInfeasibleError("request " + std::to_string(r.id) + ": " + e.what());
    }
  }

  void enqueue_arrivals() {
    while (next_arrival_ < trace_.size() && trace_[next_arrival_].arrival_time_s <= now_) {
      queue_.push_back(next_arrival_++);
    }
  }

  bool more_arrivals() const { return next_arrival_ < trace_.size(); }

  // Moves queued requests into `running_` in FCFS order while `accept`
  // and the KV budget allow. Returns the number admitted.
  template <typename Accept>
  std::size_t admit(Accept accept) {
    std::size_t admitted = 0;
    while (!queue_.empty()) {
      const auto& r = trace_[queue_.front()];
      const std::uint64_t need = reservation(r);
      if (reserved_ + need > capacity_.budget_bytes || !accept(r)) break;
      Sequence seq;
      seq.trace_index = queue_.front();
      seq.input_len = r.input_len;
      seq.output_len = r.output_len;
      seq.reserved_bytes = need;
      reserved_ += need;
      running_.push_back(seq);
      queue_.pop_front();
      ++admitted;
    }
    return admitted;
  }

  std::uint64_t allocated_now() const {
    std::uint64_t total = 0;
    for (const auto& seq : running_) {
      total += sequence_allocation_bytes(capacity_.layout, timer_.config(), static_cast<std::uint64_t>(seq.cached()));
    }
    return total;
  }

  void finish_step(StepRecord step) {
    now_ = step.start_s + step.duration_s;
    step.kv_allocated_bytes = allocated_now();
    step.kv_reserved_bytes = reserved_;
    result_.peak_kv_allocated_bytes = std::max(result_.peak_kv_allocated_bytes, step.kv_allocated_bytes);
    result_.generated_tokens += static_cast<std::uint64_t>(step.generated);
    result_.steps.push_back(step);
    retire_finished();
  }

  void retire_finished() {
    auto it = running_.begin();
    while (it != running_.end()) {
      if (!it->finished()) {
        ++it;
        continue;
      }
      const auto& r = trace_[it->trace_index];
      result_.records.push_back({r.id, r.input_len, r.output_len, r.arrival_time_s, it->first_token_s, now_});
      reserved_ -= it->reserved_bytes;
      ++completed_;
      it = running_.erase(it);
    }
  }

  // Whole-prompt prefill for running_[first, last).
  void prefill_step(std::size_t first, std::size_t last) {
    std::int64_t max_input = 0;
    std::int64_t tokens = 0;
    for (std::size_t i = first; i < last; ++i) {
      max_input = std::max(max_input, running_[i].input_len);
      tokens += running_[i].input_len;
    }
    StepRecord step;
    step.kind = StepKind::Prefill;
    step.start_s = now_;
    step.batch = static_cast<std::int64_t>(last - first);
    step.tokens = tokens;
    step.duration_s = timer_.prefill_s(step.batch, max_input);
    const double end = now_ + step.duration_s;
    for (std::size_t i = first; i < last; ++i) {
      running_[i].prompt_done = running_[i].input_len;
      running_[i].generated = 1;
      running_[i].first_token_s = end;
    }
    step.generated = step.batch;
    finish_step(step);
  }

  // One token for every prefilled, unfinished sequence.
  bool decode_step() {
    std::int64_t batch = 0;
    std::int64_t max_past = 0;
    for (const auto& seq : running_) {
      if (seq.prefilled() && !seq.finished()) {
        ++batch;
        max_past = std::max(max_past, seq.cached());
      }
    }
    if (batch == 0) return false;
    StepRecord step;
    step.kind = StepKind::Decode;
    step.start_s = now_;
    step.batch = batch;
    step.tokens = batch;
    step.generated = batch;
    step.duration_s = timer_.decode_s(batch, max_past);
    for (auto& seq : running_) {
      if (seq.prefilled() && !seq.finished()) ++seq.generated;
    }
    finish_step(step);
    return true;
  }

  bool step(const StaticBatching& p) {
    if (running_.empty()) {
      const auto want = static_cast<std::size_t>(p.batch_size);
      if (queue_.size() < want && more_arrivals()) return false;
      if (queue_.empty()) return false;
      std::size_t taken = 0;
      admit([&](const Request&) { return taken++ < want; });
      prefill_step(0, running_.size());
      return true;
    }
    return decode_step();
  }

  bool step(const ContinuousBatching& p) {
    const std::size_t before = running_.size();
    std::int64_t prompt_tokens = 0;
    admit([&](const Request& r) {
      if (static_cast<std::int64_t>(running_.size()) >= p.max_seqs) return false;
      if (prompt_tokens + r.input_len > p.max_batch_tokens) return false;
      prompt_tokens += r.input_len;
      return true;
    });
    if (running_.size() > before) {
      prefill_step(before, running_.size());
      return true;
    }
    return decode_step();
  }

  bool step(const SplitFuse& p) {
    admit([&](const Request&) { return static_cast<std::int64_t>(running_.size()) < p.max_seqs; });
    std::int64_t budget = p.token_budget;
    std::vector<std::size_t> decoders;
    std::vector<std::pair<std::size_t, std::int64_t>> chunks;
    for (std::size_t i = 0; i < running_.size() && budget > 0; ++i) {
      if (running_[i].prefilled() && !running_[i].finished()) {
        decoders.push_back(i);
        --budget;
      }
    }
    for (std::size_t i = 0; i < running_.size() && budget > 0; ++i) {
      auto& seq = running_[i];
      if (seq.prefilled()) continue;
      const std::int64_t chunk = std::min(budget, seq.input_len - seq.prompt_done);
      chunks.emplace_back(i, chunk);
      budget -= chunk;
    }
    const std::int64_t tokens = p.token_budget - budget;
    if (tokens == 0) return false;

    StepRecord step;
    step.kind = StepKind::Fused;
    step.start_s = now_;
    step.batch = static_cast<std::int64_t>(decoders.size() + chunks.size());
    step.tokens = tokens;
    step.duration_s = timer_.prefill_s(1, tokens);
    const double end = now_ + step.duration_s;
    for (auto i : decoders) ++running_[i].generated;
    step.generated = static_cast<std::int64_t>(decoders.size());
    for (auto [i, chunk] : chunks) {
      auto& seq = running_[i];
      seq.prompt_done += chunk;
      if (seq.prefilled()) {
        seq.generated = 1;
        seq.first_token_s = end;
        ++step.generated;
      }
    }
    finish_step(step);
    return true;
  }

  const SchedulingPolicy& policy_;
  std::span<const Request> trace_;
  const StepTimer& timer_;
  const KvCapacity& capacity_;

  double now_ = 0.0;
  std::size_t next_arrival_ = 0;
  std::size_t completed_ = 0;
  std::uint64_t reserved_ = 0;
  std::deque<std::size_t> queue_;
  std::vector<Sequence> running_;
  SimulationResult result_;
};

}  // namespace detail

/// Runs the trace to completion. The trace must be sorted by arrival time.
inline SimulationResult run(const SchedulingPolicy& policy, std::span<const Request> trace, const StepTimer& timer,
                            const KvCapacity& capacity = {}) {
  return detail::Engine(policy, trace, timer, capacity).run();
}

struct TrimmedRecords {
  std::vector<RequestRecord> records;
  bool warning = false;                  // too few records to trim
  std::optional<double> window_start_s;  // completion of the last dropped warm-up record
};

inline constexpr std::size_t kWarmupTrim = 100;

/// Drops the first and last 100 completions (records ordered by completion).
inline TrimmedRecords trim_warmup(std::span<const RequestRecord> records) {
  TrimmedRecords out;
  if (records.size() <= 2 * kWarmupTrim) {
    out.warning = true;
    return out;
  }
  out.records.assign(records.begin() + kWarmupTrim, records.end() - kWarmupTrim);
  out.window_start_s = records[kWarmupTrim - 1].completion_s;
  return out;
}

enum class ArrivalProcess { Poisson, Uniform };

/// Copy of the trace with arrivals re-stamped at the given rate (requests
/// per second). An infinite rate puts every arrival at t = 0.
inline std::vector<Request> with_arrivals(std::span<const Request> trace, double rate, ArrivalProcess process,
                                          std::uint64_t seed) {
  if (!(rate > 0.0)) throw NonPositiveFieldError("arrival rate must be > 0");
  std::vector<Request> out(trace.begin(), trace.end());
  if (std::isinf(rate)) {
    for (auto& r : out) r.arrival_time_s = 0.0;
    return out;
  }
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gap(rate);
  double t = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i > 0) t += process == ArrivalProcess::Poisson ? gap(rng) : 1.0 / rate;
    out[i].arrival_time_s = t;
  }
  return out;
}

struct SweepOptions {
  std::vector<std::uint64_t> seeds = {0};
  ArrivalProcess arrivals = ArrivalProcess::Poisson;
  bool trim = true;
  bool parallel = true;
};

struct RatePoint {
  double rate = 0.0;
  ServingMetrics metrics;  // mean over seeds; untrimmed where trim_warning is set
  std::vector<ServingMetrics> per_seed;
  bool trim_warning = false;
};

inline ServingMetrics mean_metrics(std::span<const ServingMetrics> runs) {
  ServingMetrics m;
  if (runs.empty()) return m;
  std::uint64_t completed = 0;
  for (const auto& r : runs) {
    m.token_throughput += r.token_throughput;
    m.seq_throughput += r.seq_throughput;
    m.mean_token_latency_s += r.mean_token_latency_s;
    m.p50_latency_s += r.p50_latency_s;
    m.p95_latency_s += r.p95_latency_s;
    completed += r.completed;
  }
  const auto n = static_cast<double>(runs.size());
  m.token_throughput /= n;
  m.seq_throughput /= n;
  m.mean_token_latency_s /= n;
  m.p50_latency_s /= n;
  m.p95_latency_s /= n;
  m.completed = completed / runs.size();
  return m;
}

/// Runs the trace at every arrival rate for every seed and averages the
/// (warm-up trimmed) metrics over seeds. Independent runs may execute in
/// parallel; results are placed by index so the output does not depend on
/// scheduling.
inline std::vector<RatePoint> sweep_rates(const SchedulingPolicy& policy, std::span<const Request> base_trace,
                                          std::span<const double> rates, const StepTimer& timer,
                                          const KvCapacity& capacity, const SweepOptions& options = {}) {
  if (options.seeds.empty()) throw Error("rate sweep needs at least one seed");
  struct Outcome {
    ServingMetrics metrics;
    bool warning = false;
  };
  const auto one = [&](double rate, std::uint64_t seed) {
    const auto trace = with_arrivals(base_trace, rate, options.arrivals, seed);
    const auto result = run(policy, trace, timer, capacity);
    if (!options.trim) return Outcome{result.metrics, false};
    const auto trimmed = trim_warmup(result.records);
    if (trimmed.warning) return Outcome{result.metrics, true};
    return Outcome{compute_metrics(trimmed.records, trimmed.window_start_s), false};
  };

  const std::size_t per_rate = options.seeds.size();
  std::vector<Outcome> outcomes(rates.size() * per_rate);
  if (options.parallel) {
    std::vector<std::future<Outcome>> jobs;
    jobs.reserve(outcomes.size());
    for (double rate : rates) {
      for (auto seed : options.seeds) jobs.push_back(std::async(std::launch::async, one, rate, seed));
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) outcomes[i] = jobs[i].get();
  } else {
    for (std::size_t r = 0; r < rates.size(); ++r) {
      for (std::size_t s = 0; s < per_rate; ++s) outcomes[r * per_rate + s] = one(rates[r], options.seeds[s]);
    }
  }

  std::vector<RatePoint> points;
  points.reserve(rates.size());
  for (std::size_t r = 0; r < rates.size(); ++r) {
    RatePoint point;
    point.rate = rates[r];
    for (std::size_t s = 0; s < per_rate; ++s) {
      const auto& o = outcomes[r * per_rate + s];
      point.per_seed.push_back(o.metrics);
      point.trim_warning = point.trim_warning || o.warning;
    }
    point.metrics = mean_metrics(point.per_seed);
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace infercost
