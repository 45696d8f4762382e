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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "infercost/error.hpp"

namespace infercost {

// Decoder-only transformer dimensions (LLaMA layout: fused-able QKV,
// SwiGLU FFN, RMSNorm). Full multi-head attention, no grouped KV heads.
struct ModelConfig {
  std::int64_t hidden_size = 0;        // h
  std::int64_t intermediate_size = 0;  // h'
  std::int64_t num_heads = 0;          // n
  std::int64_t head_dim = 0;           // d
  std::int64_t num_layers = 0;         // l
  std::int64_t bytes_per_scalar = 2;   // bf16

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

enum class Phase { Prefill, Decode };

inline std::string_view to_string(Phase phase) {
  return phase == Phase::Prefill ? "prefill" : "decode";
}

inline std::optional<Phase> parse_phase(std::string_view text) {
  if (text == "prefill") return Phase::Prefill;
  if (text == "decode") return Phase::Decode;
  return std::nullopt;
}

// One point of the (batch, length) workload grid. For Decode, seq_len is
// the number of tokens already cached per sequence.
struct WorkloadPoint {
  std::int64_t batch_size = 1;
  std::int64_t seq_len = 1;
  Phase phase = Phase::Prefill;
};

// Returns cfg unchanged when every dimension is positive and h == n * d.
inline ModelConfig validate_config(const ModelConfig& cfg) {
  struct Field {
    const char* name;
    std::int64_t value;
  };
  const Field fields[] = {
      {"hidden_size", cfg.hidden_size},       {"intermediate_size", cfg.intermediate_size},
      {"num_heads", cfg.num_heads},           {"head_dim", cfg.head_dim},
      {"num_layers", cfg.num_layers},         {"bytes_per_scalar", cfg.bytes_per_scalar},
  };
  for (const auto& f : fields) {
    if (f.value <= 0) {
      throw NonPositiveFieldError(std::string("model config field '") + f.name +
                                  "' must be positive, got " + std::to_string(f.value));
    }
  }
  // Both factors are positive; a product that overflows cannot equal h.
  std::int64_t nd = 0;
  if (__builtin_mul_overflow(cfg.num_heads, cfg.head_dim, &nd) || nd != cfg.hidden_size) {
    throw DimensionMismatchError("hidden_size (" + std::to_string(cfg.hidden_size) +
                                 ") != num_heads * head_dim (" + std::to_string(cfg.num_heads) +
                                 " * " + std::to_string(cfg.head_dim) + ")");
  }
  return cfg;
}

inline void validate_workload(const WorkloadPoint& point) {
  if (point.batch_size < 1) throw NonPositiveFieldError("batch size must be >= 1");
  if (point.seq_len < 1) throw NonPositiveFieldError("sequence length must be >= 1");
}

namespace presets {

inline constexpr ModelConfig kLlama2_7B{4096, 11008, 32, 128, 32, 2};
inline constexpr ModelConfig kLlama2_13B{5120, 13824, 40, 128, 40, 2};

inline std::optional<ModelConfig> model(std::string_view name) {
  if (name == "llama2-7b") return kLlama2_7B;
  if (name == "llama2-13b") return kLlama2_13B;
  return std::nullopt;
}

}  // namespace presets
}  // namespace infercost
