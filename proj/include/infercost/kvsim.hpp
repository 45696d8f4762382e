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

// KV-cache memory under three allocation layouts:
//   Vanilla        one contiguous buffer per sequence, reserved up front and
//                  reallocated-and-copied on every append
//   Paged          fixed-size blocks of block_size tokens
//   TokenGranular  exactly one slot per cached token

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>

#include "infercost/arch.hpp"
#include "infercost/checked.hpp"
#include "infercost/costmodel.hpp"
#include "infercost/hardware.hpp"

namespace infercost {

inline constexpr std::uint64_t kDefaultBlockSize = 16;

class CacheLayout {
 public:
  static CacheLayout vanilla(std::uint64_t reserved_len) {
    if (reserved_len < 1) throw NonPositiveFieldError("vanilla reserved_len must be >= 1");
    return CacheLayout(CacheScheme::Vanilla, reserved_len);
  }
  static CacheLayout paged(std::uint64_t block_size = kDefaultBlockSize) {
    if (block_size < 1) throw NonPositiveFieldError("paged block_size must be >= 1");
    return CacheLayout(CacheScheme::Paged, block_size);
  }
  static CacheLayout token_granular() { return CacheLayout(CacheScheme::TokenGranular, 1); }

  CacheScheme scheme() const noexcept { return scheme_; }
  // Vanilla: reserved tokens per sequence; Paged: tokens per block; 1 otherwise.
  std::uint64_t granule() const noexcept { return granule_; }

  // Tokens actually allocated for a sequence holding `tokens` entries.
  std::uint64_t allocated_tokens(std::uint64_t tokens) const {
    switch (scheme_) {
      case CacheScheme::Vanilla:
        if (tokens > granule_) {
          throw ReservedOverflowError("sequence of " + std::to_string(tokens) +
                                      " tokens exceeds vanilla reserved_len " + std::to_string(granule_));
        }
        return granule_;
      case CacheScheme::Paged:
        return checked::mul((tokens + granule_ - 1) / granule_, granule_);
      case CacheScheme::TokenGranular:
        return tokens;
    }
    return tokens;
  }

  friend bool operator==(const CacheLayout&, const CacheLayout&) = default;

 private:
  CacheLayout(CacheScheme scheme, std::uint64_t granule) : scheme_(scheme), granule_(granule) {}

  CacheScheme scheme_;
  std::uint64_t granule_;
};

struct CacheStats {
  std::uint64_t allocated_bytes = 0;
  std::uint64_t live_bytes = 0;
  std::uint64_t wasted_bytes = 0;
  std::uint64_t peak_allocated_bytes = 0;
};

// Bytes moved by the cache update of one decode step across all layers.
inline std::uint64_t cache_step_bytes(const CacheLayout& layout, const ModelConfig& cfg, std::uint64_t batch,
                                      std::uint64_t past_len) {
  const auto h = static_cast<std::uint64_t>(validate_config(cfg).hidden_size);
  const auto l = static_cast<std::uint64_t>(cfg.num_layers);
  const auto bytes = static_cast<std::uint64_t>(cfg.bytes_per_scalar);
  // K and V, each read and written.
  const std::uint64_t per_token = checked::product({2, bytes, 2, h, l, batch});
  if (layout.scheme() == CacheScheme::Vanilla) {
    return checked::mul(per_token, checked::add(past_len, 1));
  }
  return per_token;
}

/// Cache occupancy for a set of sequences. Throws ReservedOverflowError if
/// a Vanilla sequence does not fit its reservation.
inline CacheStats footprint(const CacheLayout& layout, const ModelConfig& cfg, std::span<const std::uint64_t> seq_lens) {
  const std::uint64_t per_token = kv_cache_bytes(cfg, 1, 1);
  std::uint64_t live_tokens = 0;
  std::uint64_t allocated_tokens = 0;
  for (auto len : seq_lens) {
    live_tokens = checked::add(live_tokens, len);
    allocated_tokens = checked::add(allocated_tokens, layout.allocated_tokens(len));
  }
  CacheStats stats;
  stats.live_bytes = checked::mul(live_tokens, per_token);
  stats.allocated_bytes = checked::mul(allocated_tokens, per_token);
  stats.wasted_bytes = stats.allocated_bytes - stats.live_bytes;
  stats.peak_allocated_bytes = stats.allocated_bytes;
  return stats;
}

// Cache bytes one sequence of `tokens` entries pins under the layout.
inline std::uint64_t sequence_allocation_bytes(const CacheLayout& layout, const ModelConfig& cfg,
                                               std::uint64_t tokens) {
  return checked::mul(layout.allocated_tokens(tokens), kv_cache_bytes(cfg, 1, 1));
}

/// Largest number of sequences of per_seq_len tokens whose cache fits next
/// to the weights. Zero is a valid answer.
inline std::uint64_t max_concurrency(const CacheLayout& layout, const ModelConfig& cfg, const HardwareSpec& hw,
                                     std::uint64_t model_weight_bytes, std::uint64_t per_seq_len) {
  validate_hardware(hw);
  if (model_weight_bytes >= hw.memory_bytes) {
    throw CapacityInfeasibleError("model weights (" + std::to_string(model_weight_bytes) +
                                  " B) do not fit in device memory (" + std::to_string(hw.memory_bytes) + " B)");
  }
  const std::uint64_t free_bytes = hw.memory_bytes - model_weight_bytes;
  std::uint64_t per_seq = 0;
  try {
    per_seq = sequence_allocation_bytes(layout, cfg, per_seq_len);
  } catch (const ReservedOverflowError&) {
    return 0;
  }
  if (per_seq == 0) {
    throw DegenerateCostError("zero-length sequences have no cache footprint; concurrency is unbounded");
  }
  return free_bytes / per_seq;
}

// Parameter bytes of the decoder layers (attention, FFN, two norms).
// Embedding and LM head are not part of ModelConfig.
inline std::uint64_t decoder_weight_bytes(const ModelConfig& cfg) {
  validate_config(cfg);
  const auto h = static_cast<std::uint64_t>(cfg.hidden_size);
  const auto hp = static_cast<std::uint64_t>(cfg.intermediate_size);
  const std::uint64_t per_layer =
      checked::sum({checked::product({4, h, h}), checked::product({3, h, hp}), checked::mul(2, h)});
  return checked::product({per_layer, static_cast<std::uint64_t>(cfg.num_layers),
                           static_cast<std::uint64_t>(cfg.bytes_per_scalar)});
}

}  // namespace infercost
