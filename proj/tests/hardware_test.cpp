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
#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "infercost/hardware.hpp"
#include "infercost/io.hpp"

namespace infercost {
namespace {

const ModelConfig k7B = presets::kLlama2_7B;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(RidgePoint, Presets) {
  EXPECT_NEAR(ridge_point(presets::a800()), 153.02, 0.01);
  EXPECT_NEAR(ridge_point(presets::rtx3090()), 75.85, 0.01);
  EXPECT_NEAR(ridge_point(presets::rtx4090()), 163.89, 0.01);
}

TEST(RidgePoint, RejectsZeroCapability) {
  HardwareSpec hw = presets::a800();
  hw.bandwidth_bytes_per_s = 0;
  EXPECT_THROW(ridge_point(hw), NonPositiveFieldError);
}

TEST(Classify, DecodeIsMemoryBoundPrefillProjectionsCompute) {
  const auto hw = presets::a800();
  for (const auto& c : decode_op_costs(k7B, 8, 512, CacheScheme::Paged)) {
    EXPECT_EQ(classify(c, hw), BoundKind::MemoryBound) << to_string(c.kind);
  }
  for (const auto& c : prefill_op_costs(k7B, 8, 512)) {
    if (is_linear_projection(c.kind)) {
      EXPECT_EQ(classify(c, hw), BoundKind::ComputeBound) << to_string(c.kind);
    }
  }
}

TEST(Classify, TieAndDegenerateCases) {
  // Ridge exactly 2.0.
  const HardwareSpec hw{"toy", 1000, 100, 200};
  EXPECT_EQ(classify(make_op_cost(OpKind::Rope, 200, 100), hw), BoundKind::MemoryBound);
  EXPECT_EQ(classify(make_op_cost(OpKind::Rope, 201, 100), hw), BoundKind::ComputeBound);
  EXPECT_EQ(classify(make_op_cost(OpKind::Rope, 0, 0), hw), BoundKind::MemoryBound);
  EXPECT_THROW(classify(make_op_cost(OpKind::Rope, 10, 0), hw), DegenerateCostError);
}

TEST(Attainable, BandwidthRoofAndCap) {
  const auto hw = presets::a800();
  EXPECT_NEAR(attainable_flops(8.0, hw), 1.6312e13, 1e9);
  EXPECT_DOUBLE_EQ(attainable_flops(1e6, hw), 312e12);
  EXPECT_DOUBLE_EQ(attainable_flops(ridge_point(hw), hw), 312e12);
}

TEST(Attainable, MonotoneNonDecreasing) {
  for (const auto& hw : presets::all_hardware()) {
    double prev = 0.0;
    for (double ai = 0.01; ai < 1e5; ai *= 1.3) {
      const double a = attainable_flops(ai, hw);
      EXPECT_GE(a, prev);
      EXPECT_LE(a, static_cast<double>(hw.peak_flops_per_s));
      prev = a;
    }
  }
}

TEST(LowerBoundTime, MaxOfComputeAndMemory) {
  const HardwareSpec hw{"toy", 1000, 100, 200};
  EXPECT_DOUBLE_EQ(lower_bound_time(make_op_cost(OpKind::QkvProj, 1000, 10), hw), 5.0);
  EXPECT_DOUBLE_EQ(lower_bound_time(make_op_cost(OpKind::QkvProj, 10, 1000), hw), 10.0);
}

// The bound kind and the time-limiting roof agree for every op.
TEST(LowerBoundTime, ConsistentWithClassification) {
  for (const auto& hw : presets::all_hardware()) {
    for (std::int64_t b : {1, 8, 64}) {
      for (const auto& c : prefill_op_costs(k7B, b, 512)) {
        const double compute_s = static_cast<double>(c.flops) / static_cast<double>(hw.peak_flops_per_s);
        const double memory_s = static_cast<double>(c.mops) / static_cast<double>(hw.bandwidth_bytes_per_s);
        if (classify(c, hw) == BoundKind::ComputeBound) {
          EXPECT_GE(compute_s, memory_s * (1 - 1e-12));
        } else {
          EXPECT_LE(compute_s, memory_s * (1 + 1e-12));
        }
        EXPECT_NEAR(static_cast<double>(c.flops) / lower_bound_time(c, hw),
                    attainable_flops(c.arithmetic_intensity, hw), 1e-6 * static_cast<double>(hw.peak_flops_per_s));
      }
    }
  }
}

TEST(HardwarePresets, LookupAliases) {
  EXPECT_EQ(presets::hardware("3090"), presets::rtx3090());
  EXPECT_EQ(presets::hardware("rtx4090"), presets::rtx4090());
  EXPECT_EQ(presets::hardware("a800"), presets::a800());
  EXPECT_FALSE(presets::hardware("h100"));
}

TEST(HardwarePresets, MatchShippedDataFiles) {
  for (const auto& hw : presets::all_hardware()) {
    const std::string path = std::string(INFERCOST_PAPER_DATA_DIR) + "/table6_" + hw.name + ".json";
    const std::string text = slurp(path);
    ASSERT_FALSE(text.empty()) << path;
    EXPECT_EQ(io::hardware_from_json(nlohmann::json::parse(text)), hw);
    EXPECT_EQ(io::hardware_to_json(hw).dump(2) + "\n", text);
  }
}

}  // namespace
}  // namespace infercost
