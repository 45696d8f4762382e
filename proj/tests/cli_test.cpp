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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "infercost/cli.hpp"

namespace infercost::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("infercost_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

std::string data(const std::string& file) { return paper_data_path(file); }

TEST_F(CliTest, FitThenPredictRecoversMeasuredPrefill) {
  const auto fit = cli({"fit", "--samples", data("transformers_prefill_samples.csv"), "--phase", "prefill", "--out",
                        path("coeffs.json")});
  ASSERT_EQ(fit.code, 0) << fit.err;
  EXPECT_NE(fit.err.find("rank 3/6"), std::string::npos) << fit.err;
  const auto pred = cli({"predict", "--coeffs", path("coeffs.json"), "--phase", "prefill", "--b", "8", "--s", "512"});
  ASSERT_EQ(pred.code, 0) << pred.err;
  EXPECT_NEAR(std::stod(pred.out), 526.19, 0.10 * 526.19);
}

TEST_F(CliTest, FitRejectPolicyFailsOnSingleArchitecture) {
  const auto r = cli({"fit", "--samples", data("transformers_prefill_samples.csv"), "--rank-policy", "reject"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("rank"), std::string::npos);
}

TEST_F(CliTest, PredictPublishedPreset) {
  const auto r = cli({"predict", "--coeffs", "transformers", "--phase", "decode", "--b", "8", "--s", "512"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(std::stod(r.out), 30.9, 0.5);
}

TEST_F(CliTest, PredictPhaseMismatchIsDimensionError) {
  ASSERT_EQ(cli({"fit", "--samples", data("vllm_decode_samples.csv"), "--phase", "decode", "--out",
                 path("decode.json")}).code,
            0);
  const auto r = cli({"predict", "--coeffs", path("decode.json"), "--phase", "prefill"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("dimension"), std::string::npos) << r.err;
}

TEST_F(CliTest, UnknownFlagAndMissingSubcommandAreErrors) {
  EXPECT_NE(cli({"analyze", "--bogus", "1"}).code, 0);
  EXPECT_NE(cli({}).code, 0);
  EXPECT_NE(cli({"analyze", "--phase", "train"}).code, 0);
}

TEST_F(CliTest, EverySubcommandHasHelp) {
  for (const std::string sub : {"analyze", "roofline", "fit", "predict", "memory", "workload", "simulate"}) {
    const auto r = cli({sub, "--help"});
    EXPECT_EQ(r.code, 0) << sub;
    EXPECT_NE(r.out.find("--"), std::string::npos) << sub;
  }
  EXPECT_EQ(cli({"workload", "gen", "--help"}).code, 0);
}

TEST_F(CliTest, AnalyzeFormats) {
  const auto md = cli({"analyze", "--phase", "decode", "--b", "8", "--s", "512"});
  ASSERT_EQ(md.code, 0) << md.err;
  EXPECT_NE(md.out.find("| qkv_proj |"), std::string::npos);
  EXPECT_NE(md.out.find("| 7.98 | memory |"), std::string::npos) << md.out;
  const auto csv = cli({"analyze", "--format", "csv", "--out", path("a.csv")});
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(slurp(path("a.csv")).rfind("op,flops,mops_bytes,arithmetic_intensity,bound,lower_bound_ms\n", 0), 0u);
}

TEST_F(CliTest, RooflineRidgePerPreset) {
  for (const std::string hw : {"rtx3090", "rtx4090", "a800"}) {
    const auto r = cli({"roofline", "--hardware", hw, "--svg", path(hw + ".svg")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find(fmt::format("{}", ridge_point(*presets::hardware(hw)))), std::string::npos);
    const auto svg = slurp(path(hw + ".svg"));
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_EQ(svg.substr(svg.size() - 7), "</svg>\n");
  }
}

TEST_F(CliTest, MemoryTable) {
  const auto r = cli({"memory", "--b", "1", "--s", "17", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::uint64_t per = 2ull * 32 * 4096 * 2;
  EXPECT_NE(r.out.find(fmt::format("paged,{},{},{},", 32 * per, 17 * per, 15 * per)), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("vanilla,"), std::string::npos);
  EXPECT_NE(r.out.find("token,"), std::string::npos);
  const auto one = cli({"memory", "--layout", "token", "--format", "csv"});
  EXPECT_EQ(one.out.find("paged"), std::string::npos);
}

TEST_F(CliTest, WorkloadGenDeterministic) {
  ASSERT_EQ(cli({"workload", "gen", "--scenario", "l2s", "--n", "50", "--seed", "7", "--out", path("a.jsonl")}).code, 0);
  ASSERT_EQ(cli({"workload", "gen", "--scenario", "l2s", "--n", "50", "--seed", "7", "--out", path("b.jsonl")}).code, 0);
  EXPECT_EQ(slurp(path("a.jsonl")), slurp(path("b.jsonl")));
  EXPECT_EQ(load_trace(path("a.jsonl")).size(), 50u);
  EXPECT_NE(cli({"workload", "gen", "--scenario", "nope"}).code, 0);
}

TEST_F(CliTest, SimulateIsByteIdentical) {
  const std::vector<std::string> base = {"simulate", "--scenario", "s2s", "--n", "300", "--seed", "3",
                                         "--policy", "splitfuse", "--rates", "5,20,inf", "--seeds", "2"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", path("a.csv")});
  b.insert(b.end(), {"--out", path("b.csv")});
  ASSERT_EQ(cli(a).code, 0);
  ASSERT_EQ(cli(b).code, 0);
  const auto text = slurp(path("a.csv"));
  EXPECT_EQ(text, slurp(path("b.csv")));
  EXPECT_EQ(text.rfind("policy,rate,token_throughput,seq_throughput,mean_token_latency_s,p50_latency_s,p95_latency_s,"
                       "completed\n",
                       0),
            0u);
  EXPECT_NE(text.find("splitfuse,inf,"), std::string::npos);
}

TEST_F(CliTest, SimulateTraceWithRecords) {
  std::ofstream(path("t.jsonl")) << "{\"input_tokens\": 16, \"output_tokens\": 3}\n"
                                    "{\"input_tokens\": 8, \"output_tokens\": 1, \"arrival_s\": 0.5}\n";
  const auto r = cli({"simulate", "--trace", path("t.jsonl"), "--policy", "static", "--batch-size", "1", "--records",
                      path("rec.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_NE(r.out.find("static,trace,"), std::string::npos);
  const auto rec = slurp(path("rec.csv"));
  EXPECT_EQ(rec.rfind("id,input_len,output_len,arrival_s,first_token_s,completion_s\n", 0), 0u);
}

TEST_F(CliTest, SimulateErrors) {
  std::ofstream(path("bad.jsonl")) << "{\"input_tokens\": 16, \"output_tokens\": 0}\n";
  const auto r = cli({"simulate", "--trace", path("bad.jsonl")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("line 1"), std::string::npos);
  EXPECT_NE(cli({"simulate", "--rates", "0"}).code, 0);
  EXPECT_NE(cli({"simulate", "--policy", "fifo"}).code, 0);
}

}  // namespace
}  // namespace infercost::cli
