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

#include <sstream>
#include <string>

#include "infercost/analysis.hpp"
#include "infercost/io.hpp"

namespace infercost {
namespace {

std::string data(const std::string& file) { return std::string(INFERCOST_PAPER_DATA_DIR) + "/" + file; }

TEST(ModelJson, RoundTripAndDefaults) {
  const auto cfg = presets::kLlama2_13B;
  EXPECT_EQ(io::model_from_json(nlohmann::json::parse(io::model_to_json(cfg).dump())), cfg);
  const auto j = nlohmann::json::parse(
      R"({"hidden_size": 64, "intermediate_size": 128, "num_heads": 4, "head_dim": 16, "num_layers": 2})");
  EXPECT_EQ(io::model_from_json(j).bytes_per_scalar, 2);
}

TEST(ModelJson, Rejections) {
  EXPECT_THROW(io::model_from_json(nlohmann::json::parse(
                   R"({"hidden_size": 64, "intermediate_size": 128, "num_heads": 4, "head_dim": 15, "num_layers": 2})")),
               DimensionMismatchError);
  EXPECT_THROW(io::model_from_json(nlohmann::json::parse(
                   R"({"hidden_size": 64, "intermediate_size": 128, "num_heads": 4, "head_dim": 16, "num_layers": 2, "vocab": 3})")),
               ParseError);
  EXPECT_THROW(io::model_from_json(nlohmann::json::parse(R"({"hidden_size": 64})")), ParseError);
  EXPECT_THROW(io::load_model("does-not-exist.json"), Error);
}

TEST(HardwareJson, DecimalUnits) {
  const auto hw = io::hardware_from_json(nlohmann::json::parse(
      R"({"name": "x", "memory_gb": 1.5, "bandwidth_gb_per_s": 100, "bf16_tflops": 0.5})"));
  EXPECT_EQ(hw.memory_bytes, 1'500'000'000u);
  EXPECT_EQ(hw.bandwidth_bytes_per_s, 100'000'000'000u);
  EXPECT_EQ(hw.peak_flops_per_s, 500'000'000'000u);
  EXPECT_EQ(io::load_hardware(data("table6_a800.json")), presets::a800());
}

TEST(CoefficientJson, RoundTripAndUnknownKeys) {
  const auto c = make_coefficients(Phase::Decode, {2.31e-8, 2.65e-11, 3.32e-12, 18.5});
  EXPECT_EQ(io::coefficients_from_json(nlohmann::json::parse(io::coefficients_to_json(c).dump())), c);
  EXPECT_THROW(io::coefficients_from_json(nlohmann::json::parse(
                   R"({"phase": "decode", "phi": 1, "psi": 1, "omega": 1, "nu": 1, "alpha": 1})")),
               ParseError);
  EXPECT_THROW(io::coefficients_from_json(nlohmann::json::parse(R"({"phase": "decode", "phi": 1})")), ParseError);
}

TEST(CoefficientJson, PublishedTableHasBothLibraries) {
  const auto table = io::load_coefficient_table(data("table10_coefficients.json"));
  ASSERT_EQ(table.size(), 2u);
  EXPECT_EQ(table.at("transformers").prefill.values.back(), 32.8);
  EXPECT_EQ(table.at("vllm").decode.values.front(), 2.23e-9);
}

TEST(TimingCsv, ParsesShippedSamples) {
  for (const std::string f : {"transformers_prefill_samples.csv", "transformers_decode_samples.csv",
                              "vllm_prefill_samples.csv", "vllm_decode_samples.csv"}) {
    const auto samples = io::load_timing_samples(data(f));
    EXPECT_EQ(samples.size(), 9u) << f;
  }
  const auto trf = io::load_timing_samples(data("transformers_prefill_samples.csv"));
  EXPECT_EQ(trf[2].batch, 8);
  EXPECT_EQ(trf[2].seq_len, 512);
  EXPECT_DOUBLE_EQ(trf[2].measured_ms, 526.19);
}

TEST(TimingCsv, Errors) {
  std::istringstream header("phase,b,s\n");
  EXPECT_THROW(io::read_timing_samples(header), ParseError);
  std::istringstream bad("phase,b,s,time_ms\nprefill,8,512,1.0\nprefill,x,512,1.0\n");
  try {
    io::read_timing_samples(bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream zero("phase,b,s,time_ms\nprefill,0,512,1.0\n");
  EXPECT_THROW(io::read_timing_samples(zero), BoundsError);
}

TEST(Report, MarkdownRoundsCsvKeepsPrecision) {
  ReportTable t("t", {"name", "count", "value"});
  t.add_row({std::string("a,b"), std::uint64_t{12}, 1.23456});
  std::ostringstream md, csv;
  t.write(md, ReportFormat::Markdown);
  t.write(csv, ReportFormat::Csv);
  EXPECT_NE(md.str().find("| a,b | 12 | 1.23 |"), std::string::npos) << md.str();
  EXPECT_EQ(csv.str(), "name,count,value\n\"a,b\",12,1.23456\n");
  EXPECT_THROW(t.add_row({std::string("x")}), DimensionMismatchError);
}

// CSV and markdown carry the same values: integers verbatim, reals equal
// after rounding to the markdown precision.
TEST(Analysis, CsvAndMarkdownAgree) {
  const auto table = analysis_table(presets::kLlama2_7B, presets::a800(), {8, 512, Phase::Prefill}, CacheScheme::Paged);
  ASSERT_EQ(table.rows().size(), 10u);
  for (const auto& row : table.rows()) {
    for (const auto& cell : row) {
      const auto md = render_cell(cell, ReportFormat::Markdown);
      const auto csv = render_cell(cell, ReportFormat::Csv);
      if (std::holds_alternative<double>(cell)) {
        EXPECT_EQ(md, fmt::format("{:.2f}", std::stod(csv)));
      } else {
        EXPECT_EQ(md, csv);
      }
    }
  }
}

TEST(Analysis, TotalsRowScalesByLayers) {
  const auto table = analysis_table(presets::kLlama2_7B, presets::a800(), {8, 512, Phase::Prefill}, CacheScheme::Paged);
  const auto& total = table.rows().back();
  EXPECT_EQ(std::get<std::string>(total[0]), "total_x32_layers");
  EXPECT_EQ(std::get<std::uint64_t>(total[1]), 54171013218304ull);
  EXPECT_EQ(std::get<std::uint64_t>(total[2]), 62478876672ull);
}

TEST(Roofline, CsvRidgeAndSvg) {
  const auto costs = layer_costs(presets::kLlama2_7B, {8, 512, Phase::Decode}, CacheScheme::Paged);
  std::ostringstream csv, svg;
  write_roofline_csv(csv, costs, presets::a800());
  EXPECT_EQ(csv.str().rfind("op,arithmetic_intensity,attainable_flops_per_s,ridge_point\n", 0), 0u);
  EXPECT_NE(csv.str().find(fmt::format("{}", ridge_point(presets::a800()))), std::string::npos);
  write_roofline_svg(svg, costs, presets::a800());
  const auto s = svg.str();
  EXPECT_EQ(s.rfind("<svg", 0), 0u);
  EXPECT_NE(s.find("</svg>"), std::string::npos);
  EXPECT_NE(s.find("qkv_proj"), std::string::npos);
  std::ostringstream empty;
  write_roofline_csv(empty, {}, presets::a800());
  EXPECT_EQ(empty.str(), "op,arithmetic_intensity,attainable_flops_per_s,ridge_point\n");
}

}  // namespace
}  // namespace infercost
