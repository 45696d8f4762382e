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

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "infercost/costmodel.hpp"
#include "infercost/error.hpp"

namespace infercost {

// Device capability in base units (bytes, bytes/s, FLOP/s).
struct HardwareSpec {
  std::string name;
  std::uint64_t memory_bytes = 0;
  std::uint64_t bandwidth_bytes_per_s = 0;
  std::uint64_t peak_flops_per_s = 0;

  friend bool operator==(const HardwareSpec&, const HardwareSpec&) = default;
};

enum class BoundKind { ComputeBound, MemoryBound };

inline std::string_view to_string(BoundKind kind) {
  return kind == BoundKind::ComputeBound ? "compute" : "memory";
}

inline const HardwareSpec& validate_hardware(const HardwareSpec& hw) {
  if (hw.memory_bytes == 0 || hw.bandwidth_bytes_per_s == 0 || hw.peak_flops_per_s == 0) {
    throw NonPositiveFieldError("hardware '" + hw.name + "' has a non-positive capability");
  }
  return hw;
}

// Arithmetic intensity (FLOP/byte) where the bandwidth roof meets the compute roof.
inline double ridge_point(const HardwareSpec& hw) {
  validate_hardware(hw);
  return static_cast<double>(hw.peak_flops_per_s) / static_cast<double>(hw.bandwidth_bytes_per_s);
}

// Ties go to MemoryBound.
inline BoundKind classify(const OpCost& cost, const HardwareSpec& hw) {
  if (cost.mops == 0) {
    if (cost.flops > 0) {
      throw DegenerateCostError("op '" + std::string(to_string(cost.kind)) + "' has FLOPs but no memory traffic");
    }
    return BoundKind::MemoryBound;
  }
  return cost.arithmetic_intensity > ridge_point(hw) ? BoundKind::ComputeBound : BoundKind::MemoryBound;
}

inline double attainable_flops(double arithmetic_intensity, const HardwareSpec& hw) {
  validate_hardware(hw);
  const double bw_roof = arithmetic_intensity * static_cast<double>(hw.bandwidth_bytes_per_s);
  return std::min(static_cast<double>(hw.peak_flops_per_s), bw_roof);
}

// Roofline time floor in seconds.
inline double lower_bound_time(const OpCost& cost, const HardwareSpec& hw) {
  validate_hardware(hw);
  const double compute_s = static_cast<double>(cost.flops) / static_cast<double>(hw.peak_flops_per_s);
  const double memory_s = static_cast<double>(cost.mops) / static_cast<double>(hw.bandwidth_bytes_per_s);
  return std::max(compute_s, memory_s);
}

namespace presets {

// Memory GB, bandwidth GB/s, BF16 TFLOP/s of the three evaluation GPUs,
// decimal units.
inline HardwareSpec rtx3090() { return {"rtx3090", 24'000'000'000ULL, 936'000'000'000ULL, 71'000'000'000'000ULL}; }
inline HardwareSpec rtx4090() { return {"rtx4090", 24'000'000'000ULL, 1'008'000'000'000ULL, 165'200'000'000'000ULL}; }
inline HardwareSpec a800() { return {"a800", 80'000'000'000ULL, 2'039'000'000'000ULL, 312'000'000'000'000ULL}; }

inline std::array<HardwareSpec, 3> all_hardware() { return {rtx3090(), rtx4090(), a800()}; }

inline std::optional<HardwareSpec> hardware(std::string_view name) {
  for (auto& hw : all_hardware()) {
    if (hw.name == name) return hw;
  }
  if (name == "3090") return rtx3090();
  if (name == "4090") return rtx4090();
  return std::nullopt;
}

}  // namespace presets
}  // namespace infercost
