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

// Per-operation FLOPs and memory traffic of one LLaMA decoder layer.
//
// FLOPs follow the standard closed forms (QKV 6bsh^2, RoPE 6bsh,
// attention 4bs^2h + 4bs^2n, ...). Memory traffic ("MOPs") is an ideal
// single-pass byte model: every activation operand is read once, every
// weight matrix is read once, every result is written once. Real kernels
// re-read tiles, so the model is a lower bound on traffic and an upper bound
// on arithmetic intensity.
//
// All counts are exact 64-bit integers; overflow throws OverflowError.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "infercost/arch.hpp"
#include "infercost/checked.hpp"

namespace infercost {

enum class OpKind {
  QkvProj,
  Rope,
  CacheUpdate,
  Attention,
  OutProj,
  AddNormAttn,
  GateUpProj,
  SwishMul,
  DownProj,
  AddNormFfn,
};

inline constexpr std::array<OpKind, 9> kPrefillOps = {
    OpKind::QkvProj,     OpKind::Rope,       OpKind::Attention, OpKind::OutProj,   OpKind::AddNormAttn,
    OpKind::GateUpProj,  OpKind::SwishMul,   OpKind::DownProj,  OpKind::AddNormFfn,
};

inline constexpr std::array<OpKind, 10> kDecodeOps = {
    OpKind::QkvProj,     OpKind::Rope,       OpKind::CacheUpdate, OpKind::Attention,
    OpKind::OutProj,     OpKind::AddNormAttn, OpKind::GateUpProj, OpKind::SwishMul,
    OpKind::DownProj,    OpKind::AddNormFfn,
};

inline std::string_view to_string(OpKind kind) {
  switch (kind) {
    case OpKind::QkvProj: return "qkv_proj";
    case OpKind::Rope: return "rope";
    case OpKind::CacheUpdate: return "cache_update";
    case OpKind::Attention: return "attention";
    case OpKind::OutProj: return "out_proj";
    case OpKind::AddNormAttn: return "add_norm_attn";
    case OpKind::GateUpProj: return "gate_up_proj";
    case OpKind::SwishMul: return "swish_mul";
    case OpKind::DownProj: return "down_proj";
    case OpKind::AddNormFfn: return "add_norm_ffn";
  }
  return "unknown";
}

inline bool is_linear_projection(OpKind kind) {
  return kind == OpKind::QkvProj || kind == OpKind::OutProj || kind == OpKind::GateUpProj ||
         kind == OpKind::DownProj;
}

// How the decode step appends the new k/v to the cache. Vanilla
// concatenates into a fresh buffer (copying the whole past cache); Paged and
// TokenGranular only write the new entries.
enum class CacheScheme { Vanilla, Paged, TokenGranular };

inline std::string_view to_string(CacheScheme scheme) {
  switch (scheme) {
    case CacheScheme::Vanilla: return "vanilla";
    case CacheScheme::Paged: return "paged";
    case CacheScheme::TokenGranular: return "token";
  }
  return "unknown";
}

inline std::optional<CacheScheme> parse_cache_scheme(std::string_view text) {
  if (text == "vanilla") return CacheScheme::Vanilla;
  if (text == "paged" || text == "blocked") return CacheScheme::Paged;
  if (text == "token") return CacheScheme::TokenGranular;
  return std::nullopt;
}

struct OpCost {
  OpKind kind = OpKind::QkvProj;
  std::uint64_t flops = 0;
  std::uint64_t mops = 0;  // bytes read + written
  double arithmetic_intensity = 0.0;

  friend bool operator==(const OpCost&, const OpCost&) = default;
};

inline OpCost make_op_cost(OpKind kind, std::uint64_t flops, std::uint64_t mops) {
  OpCost c{kind, flops, mops, 0.0};
  if (flops != 0 && mops != 0) {
    c.arithmetic_intensity = static_cast<double>(flops) / static_cast<double>(mops);
  }
  return c;
}

namespace detail {

struct Dims {
  std::uint64_t h, hp, n, l, bytes;
};

inline Dims dims_of(const ModelConfig& cfg) {
  validate_config(cfg);
  return {static_cast<std::uint64_t>(cfg.hidden_size), static_cast<std::uint64_t>(cfg.intermediate_size),
          static_cast<std::uint64_t>(cfg.num_heads), static_cast<std::uint64_t>(cfg.num_layers),
          static_cast<std::uint64_t>(cfg.bytes_per_scalar)};
}

inline std::uint64_t positive(std::int64_t v, const char* what) {
  if (v < 1) throw NonPositiveFieldError(std::string(what) + " must be >= 1");
  return static_cast<std::uint64_t>(v);
}

// Ops whose shape depends only on the number of tokens in the step
// (b*s in prefill, b in decode). Attention and the cache are handled by the
// callers.
inline OpCost token_local_op(OpKind kind, const Dims& d, std::uint64_t tokens) {
  using checked::mul;
  using checked::product;
  using checked::sum;
  const std::uint64_t th = mul(tokens, d.h);
  const std::uint64_t thp = mul(tokens, d.hp);
  const std::uint64_t hh = mul(d.h, d.h);
  const std::uint64_t hhp = mul(d.h, d.hp);
  switch (kind) {
    case OpKind::QkvProj:
      // X read, W_QKV (3 h x h) read, Q/K/V written.
      return make_op_cost(kind, product({6, th, d.h}), mul(d.bytes, sum({th, mul(3, hh), mul(3, th)})));
    case OpKind::Rope:
      // Q and K read and written back.
      return make_op_cost(kind, mul(6, th), mul(d.bytes, mul(4, th)));
    case OpKind::OutProj:
      return make_op_cost(kind, product({2, th, d.h}), mul(d.bytes, sum({th, hh, th})));
    case OpKind::AddNormAttn:
    case OpKind::AddNormFfn:
      // Residual and input read, norm gain read, output written.
      return make_op_cost(kind, mul(5, th), mul(d.bytes, sum({mul(3, th), d.h})));
    case OpKind::GateUpProj:
      return make_op_cost(kind, product({4, th, d.hp}), mul(d.bytes, sum({th, mul(2, hhp), mul(2, thp)})));
    case OpKind::SwishMul:
      // G and U read, D written.
      return make_op_cost(kind, mul(2, thp), mul(d.bytes, mul(3, thp)));
    case OpKind::DownProj:
      return make_op_cost(kind, product({2, th, d.hp}), mul(d.bytes, sum({thp, hhp, th})));
    case OpKind::Attention:
    case OpKind::CacheUpdate:
      break;
  }
  throw Error("token_local_op called for a sequence-dependent op");
}

}  // namespace detail

/// One decoder layer in the prefill phase, in the fixed 9-row order of
/// kPrefillOps.
inline std::vector<OpCost> prefill_op_costs(const ModelConfig& cfg, std::int64_t batch, std::int64_t seq_len) {
  using checked::mul;
  using checked::product;
  using checked::sum;
  const auto d = detail::dims_of(cfg);
  const std::uint64_t b = detail::positive(batch, "batch size");
  const std::uint64_t s = detail::positive(seq_len, "sequence length");
  const std::uint64_t tokens = mul(b, s);

  std::vector<OpCost> out;
  out.reserve(kPrefillOps.size());
  for (OpKind kind : kPrefillOps) {
    if (kind != OpKind::Attention) {
      out.push_back(detail::token_local_op(kind, d, tokens));
      continue;
    }
    const std::uint64_t bss = product({b, s, s});
    const std::uint64_t flops = sum({product({4, bss, d.h}), product({4, bss, d.n})});
    // Q, K, V read; score matrix written then read; O written.
    const std::uint64_t th = mul(tokens, d.h);
    const std::uint64_t mops = mul(d.bytes, sum({mul(3, th), product({2, bss, d.n}), th}));
    out.push_back(make_op_cost(kind, flops, mops));
  }
  return out;
}

/// One decoder layer generating one token per sequence, with past_len
/// tokens already cached, in the fixed 10-row order of kDecodeOps.
inline std::vector<OpCost> decode_op_costs(const ModelConfig& cfg, std::int64_t batch, std::int64_t past_len,
                                           CacheScheme scheme) {
  using checked::mul;
  using checked::product;
  using checked::sum;
  const auto d = detail::dims_of(cfg);
  const std::uint64_t b = detail::positive(batch, "batch size");
  const std::uint64_t s = detail::positive(past_len, "past length");
  const std::uint64_t bh = mul(b, d.h);

  std::vector<OpCost> out;
  out.reserve(kDecodeOps.size());
  for (OpKind kind : kDecodeOps) {
    switch (kind) {
      case OpKind::CacheUpdate: {
        // k and v: read + written each.
        std::uint64_t mops = mul(4, bh);
        if (scheme == CacheScheme::Vanilla) {
          mops = sum({product({4, b, s, d.h}), mops});
        }
        out.push_back(make_op_cost(kind, 0, mul(d.bytes, mops)));
        break;
      }
      case OpKind::Attention: {
        const std::uint64_t bs = mul(b, s);
        const std::uint64_t flops = sum({product({4, bs, d.h}), product({4, bs, d.n})});
        // q read, cached K and V read, scores written then read, o written.
        const std::uint64_t mops =
            mul(d.bytes, sum({bh, product({2, bs, d.h}), product({2, bs, d.n}), bh}));
        out.push_back(make_op_cost(kind, flops, mops));
        break;
      }
      default:
        out.push_back(detail::token_local_op(kind, d, b));
        break;
    }
  }
  return out;
}

struct ModelCost {
  std::uint64_t total_flops = 0;
  std::uint64_t total_mops = 0;
  std::vector<OpCost> per_kind;  // each row scaled by num_layers

  double arithmetic_intensity() const {
    return total_mops == 0 ? 0.0 : static_cast<double>(total_flops) / static_cast<double>(total_mops);
  }
};

// Whole-model cost: every per-layer figure times num_layers.
inline ModelCost aggregate(std::span<const OpCost> layer_costs, const ModelConfig& cfg) {
  const auto layers = detail::dims_of(cfg).l;
  ModelCost total;
  total.per_kind.reserve(layer_costs.size());
  for (const auto& c : layer_costs) {
    auto scaled = make_op_cost(c.kind, checked::mul(c.flops, layers), checked::mul(c.mops, layers));
    total.total_flops = checked::add(total.total_flops, scaled.flops);
    total.total_mops = checked::add(total.total_mops, scaled.mops);
    total.per_kind.push_back(scaled);
  }
  return total;
}

// K and V for every layer: 2 * l * h * bytes per cached token.
inline std::uint64_t kv_cache_bytes(const ModelConfig& cfg, std::uint64_t batch, std::uint64_t seq_len) {
  const auto d = detail::dims_of(cfg);
  return checked::product({2, d.l, d.h, d.bytes, batch, seq_len});
}

}  // namespace infercost
