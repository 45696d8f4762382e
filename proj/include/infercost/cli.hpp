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

// Command-line front end. run_cli() takes the argument list and output
// streams explicitly so the whole surface can be driven from tests.
//
//   analyze   per-op FLOPs / bytes / intensity / bound table
//   roofline  roofline CSV (+ optional SVG)
//   fit       least-squares runtime coefficients from a timing CSV
//   predict   runtime from coefficients
//   memory    KV-cache footprint and capacity planning
//   workload  synthetic trace generation (`workload gen`)
//   simulate  serving simulation, optionally swept over arrival rates

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "infercost/analysis.hpp"
#include "infercost/arch.hpp"
#include "infercost/costmodel.hpp"
#include "infercost/estimator.hpp"
#include "infercost/hardware.hpp"
#include "infercost/io.hpp"
#include "infercost/kvsim.hpp"
#include "infercost/report.hpp"
#include "infercost/servesim.hpp"
#include "infercost/workload.hpp"

#ifndef INFERCOST_PAPER_DATA_DIR
#define INFERCOST_PAPER_DATA_DIR "paper-data"
#endif

namespace infercost::cli {

inline constexpr const char* kPaperDataEnv = "INFERCOST_PAPER_DATA";

inline std::string paper_data_dir() {
  if (const char* env = std::getenv(kPaperDataEnv); env && *env) return env;
  return INFERCOST_PAPER_DATA_DIR;
}

inline std::string paper_data_path(const std::string& file) { return paper_data_dir() + "/" + file; }

namespace detail {

inline Phase require_phase(const std::string& text) {
  auto p = parse_phase(text);
  if (!p) throw Error("--phase must be prefill or decode, got '" + text + "'");
  return *p;
}

inline CacheScheme require_scheme(const std::string& text) {
  auto s = parse_cache_scheme(text);
  if (!s) throw Error("--layout must be vanilla, paged or token, got '" + text + "'");
  return *s;
}

inline ReportFormat require_format(const std::string& text) {
  auto f = parse_report_format(text);
  if (!f) throw Error("--format must be markdown or csv, got '" + text + "'");
  return *f;
}

inline CacheLayout make_layout(CacheScheme scheme, std::uint64_t block_size, std::uint64_t reserved_len) {
  switch (scheme) {
    case CacheScheme::Vanilla: return CacheLayout::vanilla(reserved_len);
    case CacheScheme::Paged: return CacheLayout::paged(block_size);
    case CacheScheme::TokenGranular: return CacheLayout::token_granular();
  }
  return CacheLayout::token_granular();
}

// Writes to --out when given, otherwise to the command's output stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw Error("cannot write '" + path + "'");
    stream_ = file_.get();
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

// Coefficients by name: "<library>" picks both phases from the published
// table in the paper-data directory; anything else is a JSON file holding
// either a single-phase object or a {"prefill","decode"} pair.
inline io::CoefficientPair load_pair_or_partial(const std::string& spec, std::optional<RegressionCoefficients>& single) {
  const std::string table_path = paper_data_path("table10_coefficients.json");
  if (spec.find('/') == std::string::npos && spec.find(".json") == std::string::npos) {
    const auto table = io::load_coefficient_table(table_path);
    auto it = table.find(spec);
    if (it == table.end()) throw Error("unknown coefficient preset '" + spec + "' (not in " + table_path + ")");
    return it->second;
  }
  const auto obj = io::parse_json(io::read_file(spec), spec);
  if (obj.is_object() && obj.contains("phase")) {
    single = io::coefficients_from_json(obj, spec);
    return {};
  }
  return io::coefficient_pair_from_json(obj, spec);
}

inline std::vector<double> parse_rates(const std::string& text) {
  std::vector<double> rates;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "inf") {
      rates.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    std::size_t used = 0;
    double r = 0.0;
    try {
      r = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !(r > 0.0)) throw Error("--rates entries must be positive numbers or 'inf', got '" + item + "'");
    rates.push_back(r);
  }
  return rates;
}

}  // namespace detail

struct CommonOptions {
  std::string model = "llama2-7b";
  std::string hardware = "a800";
  std::int64_t b = 8;
  std::int64_t s = 512;
  std::string phase = "prefill";
  std::string layout = "paged";
  std::string format = "markdown";
  std::string out;
  std::uint64_t seed = 0;
};

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Analytical cost model and serving simulator for LLaMA-style inference", "infercost"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  std::function<void()> action;

  // analyze ---------------------------------------------------------------
  CommonOptions an;
  auto* analyze = app.add_subcommand("analyze", "Per-op FLOPs, bytes, arithmetic intensity and roofline bound");
  analyze->add_option("--model", an.model, "Model preset (llama2-7b, llama2-13b) or JSON config path");
  analyze->add_option("--hardware", an.hardware, "Hardware preset (rtx3090, rtx4090, a800) or JSON path");
  analyze->add_option("--b", an.b, "Batch size");
  analyze->add_option("--s", an.s, "Prompt length (prefill) or cached length (decode)");
  analyze->add_option("--phase", an.phase, "prefill or decode");
  analyze->add_option("--layout", an.layout, "KV cache layout for decode: vanilla, paged, token");
  analyze->add_option("--format", an.format, "markdown or csv");
  analyze->add_option("--out", an.out, "Output path (default stdout)");
  analyze->callback([&] {
    action = [&] {
      const auto cfg = io::load_model(an.model);
      const auto hw = io::load_hardware(an.hardware);
      const auto table = analysis_table(cfg, hw, {an.b, an.s, detail::require_phase(an.phase)},
                                        detail::require_scheme(an.layout));
      detail::Sink sink(an.out, out);
      table.write(sink.get(), detail::require_format(an.format));
    };
  });

  // roofline --------------------------------------------------------------
  CommonOptions rf;
  std::string svg_path;
  auto* roofline = app.add_subcommand("roofline", "Roofline CSV of every op, optional SVG scatter");
  roofline->add_option("--model", rf.model, "Model preset or JSON config path");
  roofline->add_option("--hardware", rf.hardware, "Hardware preset or JSON path");
  roofline->add_option("--b", rf.b, "Batch size");
  roofline->add_option("--s", rf.s, "Sequence length");
  roofline->add_option("--phase", rf.phase, "prefill or decode");
  roofline->add_option("--layout", rf.layout, "KV cache layout for decode");
  roofline->add_option("--out", rf.out, "CSV output path (default stdout)");
  roofline->add_option("--svg", svg_path, "Also write an SVG scatter to this path");
  roofline->callback([&] {
    action = [&] {
      const auto cfg = io::load_model(rf.model);
      const auto hw = io::load_hardware(rf.hardware);
      const auto costs = layer_costs(cfg, {rf.b, rf.s, detail::require_phase(rf.phase)}, detail::require_scheme(rf.layout));
      detail::Sink sink(rf.out, out);
      write_roofline_csv(sink.get(), costs, hw);
      if (!svg_path.empty()) {
        detail::Sink svg(svg_path, out);
        write_roofline_svg(svg.get(), costs, hw);
      }
    };
  });

  // fit -------------------------------------------------------------------
  CommonOptions ft;
  std::string samples_path;
  std::string rank_policy = "min-norm";
  auto* fit_cmd = app.add_subcommand("fit", "Least-squares runtime coefficients from a timing CSV (phase,b,s,time_ms)");
  fit_cmd->add_option("--samples", samples_path, "Timing CSV")->required();
  fit_cmd->add_option("--model", ft.model, "Model preset or JSON config path");
  fit_cmd->add_option("--phase", ft.phase, "prefill or decode");
  fit_cmd->add_option("--rank-policy", rank_policy,
                      "reject: fail on a rank-deficient design; min-norm: minimum-norm least squares");
  fit_cmd->add_option("--out", ft.out, "Coefficient JSON output path (default stdout)");
  fit_cmd->callback([&] {
    action = [&] {
      const auto cfg = io::load_model(ft.model);
      const auto phase = detail::require_phase(ft.phase);
      FitOptions options;
      if (rank_policy == "reject") {
        options.rank_policy = RankPolicy::Reject;
      } else if (rank_policy == "min-norm") {
        options.rank_policy = RankPolicy::MinimumNorm;
      } else {
        throw Error("--rank-policy must be reject or min-norm");
      }
      auto samples = io::load_timing_samples(samples_path);
      std::erase_if(samples, [&](const TimingSample& s) { return s.phase != phase; });
      const auto result = fit(samples, cfg, phase, options);
      detail::Sink sink(ft.out, out);
      sink.get() << io::coefficients_to_json(result.coefficients).dump(2) << '\n';
      err << fmt::format("fit: {} samples, rank {}/{}, rms relative error {:.4f}{}\n", samples.size(),
                         result.diagnostics.rank, coefficient_count(phase), result.diagnostics.rms_relative_error,
                         result.diagnostics.condition_warning ? ", condition warning" : "");
    };
  });

  // predict ---------------------------------------------------------------
  CommonOptions pr;
  std::string coeffs_spec;
  auto* predict_cmd = app.add_subcommand("predict", "Predicted whole-model step time in milliseconds");
  predict_cmd->add_option("--coeffs", coeffs_spec, "Coefficient JSON path or published preset (transformers, vllm)")
      ->required();
  predict_cmd->add_option("--model", pr.model, "Model preset or JSON config path");
  predict_cmd->add_option("--phase", pr.phase, "prefill or decode");
  predict_cmd->add_option("--b", pr.b, "Batch size");
  predict_cmd->add_option("--s", pr.s, "Prompt length (prefill) or cached length (decode)");
  predict_cmd->callback([&] {
    action = [&] {
      const auto cfg = io::load_model(pr.model);
      const auto phase = detail::require_phase(pr.phase);
      std::optional<RegressionCoefficients> single;
      auto pair = detail::load_pair_or_partial(coeffs_spec, single);
      const RegressionCoefficients coeffs =
          single ? *single : (phase == Phase::Prefill ? pair.prefill : pair.decode);
      // A single-phase file is checked against --phase through its width.
      out << fmt::format("{}\n", predict(coeffs, features(phase, cfg, pr.b, pr.s)));
    };
  });

  // memory ----------------------------------------------------------------
  CommonOptions mem;
  std::uint64_t block_size = kDefaultBlockSize;
  std::uint64_t reserved_len = 4096;
  std::int64_t weight_bytes = -1;
  auto* memory = app.add_subcommand("memory", "KV-cache footprint, per-step cache traffic and max concurrency");
  memory->add_option("--model", mem.model, "Model preset or JSON config path");
  memory->add_option("--hardware", mem.hardware, "Hardware preset or JSON path");
  memory->add_option("--layout", mem.layout, "vanilla, paged or token (default all three)");
  memory->add_option("--block-size", block_size, "Paged block size in tokens");
  memory->add_option("--reserved-len", reserved_len, "Vanilla per-sequence reservation in tokens");
  memory->add_option("--b", mem.b, "Number of sequences");
  memory->add_option("--s", mem.s, "Tokens per sequence");
  memory->add_option("--weight-bytes", weight_bytes, "Model weight bytes (default: decoder-layer parameters)");
  memory->add_option("--format", mem.format, "markdown or csv");
  memory->add_option("--out", mem.out, "Output path (default stdout)");
  bool memory_layout_given = false;
  memory->callback([&] {
    memory_layout_given = memory->count("--layout") > 0;
    action = [&] {
      const auto cfg = io::load_model(mem.model);
      const auto hw = io::load_hardware(mem.hardware);
      if (mem.b < 1 || mem.s < 0) throw Error("--b must be >= 1 and --s >= 0");
      const std::uint64_t weights =
          weight_bytes >= 0 ? static_cast<std::uint64_t>(weight_bytes) : decoder_weight_bytes(cfg);
      std::vector<CacheScheme> schemes = {CacheScheme::Vanilla, CacheScheme::Paged, CacheScheme::TokenGranular};
      if (memory_layout_given) schemes = {detail::require_scheme(mem.layout)};

      ReportTable table(fmt::format("KV cache, {} sequences x {} tokens, {}", mem.b, mem.s, hw.name),
                        {"layout", "allocated_bytes", "live_bytes", "wasted_bytes", "step_cache_bytes",
                         "max_concurrency"});
      const std::vector<std::uint64_t> lens(static_cast<std::size_t>(mem.b), static_cast<std::uint64_t>(mem.s));
      for (auto scheme : schemes) {
        const auto layout = detail::make_layout(scheme, block_size, reserved_len);
        const auto stats = footprint(layout, cfg, lens);
        const auto past = static_cast<std::uint64_t>(std::max<std::int64_t>(mem.s, 1));
        table.add_row({std::string(to_string(scheme)), stats.allocated_bytes, stats.live_bytes, stats.wasted_bytes,
                       cache_step_bytes(layout, cfg, static_cast<std::uint64_t>(mem.b), past),
                       max_concurrency(layout, cfg, hw, weights, static_cast<std::uint64_t>(std::max<std::int64_t>(mem.s, 1)))});
      }
      detail::Sink sink(mem.out, out);
      table.write(sink.get(), detail::require_format(mem.format));
    };
  });

  // workload gen ----------------------------------------------------------
  auto* workload = app.add_subcommand("workload", "Synthetic request traces");
  workload->require_subcommand(1);
  std::string scenario_name = "s2s";
  std::int64_t workload_n = -1;
  CommonOptions wl;
  auto* gen = workload->add_subcommand("gen", "Write a JSON-lines trace for a dataset scenario");
  gen->add_option("--scenario", scenario_name, "s2s, s2l, s16k or l2s");
  gen->add_option("--n", workload_n, "Number of requests (default: scenario size)");
  gen->add_option("--seed", wl.seed, "Random seed");
  gen->add_option("--out", wl.out, "Output path (default stdout)");
  gen->callback([&] {
    action = [&] {
      const auto scenario = parse_scenario(scenario_name);
      if (!scenario) throw Error("--scenario must be s2s, s2l, s16k or l2s");
      const std::int64_t n = workload_n < 0 ? bounds(*scenario).default_count : workload_n;
      if (n < 1) throw Error("--n must be >= 1");
      detail::Sink sink(wl.out, out);
      write_trace(sink.get(), generate(*scenario, static_cast<std::size_t>(n), wl.seed));
    };
  });

  // simulate --------------------------------------------------------------
  CommonOptions sm;
  std::string trace_path, policy_name_opt = "continuous", sim_coeffs = "vllm", rates_text, arrivals = "poisson",
                          records_path, sim_scenario = "s2s";
  std::int64_t sim_n = -1, batch_size = 8, max_seqs = 256, max_batch_tokens = 4096, token_budget = 512;
  std::int64_t num_seeds = 1, sim_weight_bytes = -1;
  std::uint64_t sim_block = kDefaultBlockSize, sim_reserved = 4096;
  bool no_trim = false;
  auto* simulate = app.add_subcommand("simulate", "Serving simulation; emits one metrics CSV row per (policy, rate)");
  simulate->add_option("--trace", trace_path, "JSON-lines trace (default: generate from --scenario)");
  simulate->add_option("--scenario", sim_scenario, "Scenario when no trace is given");
  simulate->add_option("--n", sim_n, "Requests to generate when no trace is given");
  simulate->add_option("--seed", sm.seed, "Base seed (workload generation and arrivals)");
  simulate->add_option("--seeds", num_seeds, "Number of consecutive seeds averaged per rate");
  simulate->add_option("--policy", policy_name_opt, "static, continuous or splitfuse");
  simulate->add_option("--batch-size", batch_size, "Static batch size");
  simulate->add_option("--max-seqs", max_seqs, "Continuous/SplitFuse running-sequence limit");
  simulate->add_option("--max-batch-tokens", max_batch_tokens, "Continuous prompt tokens per prefill step");
  simulate->add_option("--token-budget", token_budget, "SplitFuse tokens per step");
  simulate->add_option("--coeffs", sim_coeffs, "Published preset (transformers, vllm) or JSON with prefill+decode");
  simulate->add_option("--model", sm.model, "Model preset or JSON config path");
  simulate->add_option("--hardware", sm.hardware, "Hardware preset or JSON path (KV budget)");
  simulate->add_option("--layout", sm.layout, "KV cache layout: vanilla, paged, token");
  simulate->add_option("--block-size", sim_block, "Paged block size in tokens");
  simulate->add_option("--reserved-len", sim_reserved, "Vanilla reservation in tokens");
  simulate->add_option("--weight-bytes", sim_weight_bytes, "Model weight bytes (default: decoder-layer parameters)");
  simulate->add_option("--rates", rates_text, "Comma-separated arrival rates in requests/s ('inf' allowed)");
  simulate->add_option("--arrivals", arrivals, "poisson or uniform");
  simulate->add_flag("--no-trim", no_trim, "Keep the first/last 100 completions");
  simulate->add_option("--records", records_path, "Write per-request records CSV (single run only)");
  simulate->add_option("--out", sm.out, "Metrics CSV output path (default stdout)");
  simulate->callback([&] {
    action = [&] {
      const auto cfg = io::load_model(sm.model);
      const auto hw = io::load_hardware(sm.hardware);
      std::optional<RegressionCoefficients> single;
      const auto pair = detail::load_pair_or_partial(sim_coeffs, single);
      if (single) throw MissingCoefficientsError("simulation needs both prefill and decode coefficients");
      const StepTimer timer(cfg, pair.prefill, pair.decode);

      SchedulingPolicy policy;
      if (policy_name_opt == "static") {
        policy = StaticBatching{batch_size};
      } else if (policy_name_opt == "continuous") {
        policy = ContinuousBatching{max_seqs, max_batch_tokens};
      } else if (policy_name_opt == "splitfuse") {
        policy = SplitFuse{token_budget, max_seqs};
      } else {
        throw Error("--policy must be static, continuous or splitfuse");
      }

      const std::uint64_t weights =
          sim_weight_bytes >= 0 ? static_cast<std::uint64_t>(sim_weight_bytes) : decoder_weight_bytes(cfg);
      if (weights >= hw.memory_bytes) throw CapacityInfeasibleError("model weights exceed device memory");
      const KvCapacity capacity{detail::make_layout(detail::require_scheme(sm.layout), sim_block, sim_reserved),
                                hw.memory_bytes - weights};

      std::vector<Request> trace;
      if (!trace_path.empty()) {
        trace = load_trace(trace_path);
      } else {
        const auto scenario = parse_scenario(sim_scenario);
        if (!scenario) throw Error("--scenario must be s2s, s2l, s16k or l2s");
        const std::int64_t n = sim_n < 0 ? bounds(*scenario).default_count : sim_n;
        if (n < 1) throw Error("--n must be >= 1");
        trace = generate(*scenario, static_cast<std::size_t>(n), sm.seed);
      }
      if (num_seeds < 1) throw Error("--seeds must be >= 1");

      ReportTable table("serving metrics", {"policy", "rate", "token_throughput", "seq_throughput",
                                            "mean_token_latency_s", "p50_latency_s", "p95_latency_s", "completed"});
      const auto add = [&](const std::string& rate, const ServingMetrics& m) {
        table.add_row({policy_name(policy), rate, m.token_throughput, m.seq_throughput, m.mean_token_latency_s,
                       m.p50_latency_s, m.p95_latency_s, static_cast<std::uint64_t>(m.completed)});
      };

      if (rates_text.empty()) {
        std::stable_sort(trace.begin(), trace.end(),
                         [](const Request& a, const Request& b) { return a.arrival_time_s < b.arrival_time_s; });
        const auto result = run(policy, trace, timer, capacity);
        ServingMetrics m = result.metrics;
        if (!no_trim) {
          const auto trimmed = trim_warmup(result.records);
          if (trimmed.warning) {
            err << "warning: " << result.records.size() << " completions; too few to trim warm-up, reporting all\n";
          } else {
            m = compute_metrics(trimmed.records, trimmed.window_start_s);
          }
        }
        add("trace", m);
        if (!records_path.empty()) {
          detail::Sink rec(records_path, out);
          ReportTable records("records", {"id", "input_len", "output_len", "arrival_s", "first_token_s", "completion_s"});
          for (const auto& r : result.records) {
            records.add_row({fmt::format("{}", r.id), static_cast<std::uint64_t>(r.input_len),
                             static_cast<std::uint64_t>(r.output_len), r.arrival_s, r.first_token_s, r.completion_s});
          }
          records.write(rec.get(), ReportFormat::Csv);
        }
      } else {
        const auto rates = detail::parse_rates(rates_text);
        SweepOptions options;
        options.seeds.clear();
        for (std::int64_t i = 0; i < num_seeds; ++i) options.seeds.push_back(sm.seed + static_cast<std::uint64_t>(i));
        if (arrivals == "poisson") {
          options.arrivals = ArrivalProcess::Poisson;
        } else if (arrivals == "uniform") {
          options.arrivals = ArrivalProcess::Uniform;
        } else {
          throw Error("--arrivals must be poisson or uniform");
        }
        options.trim = !no_trim;
        const auto points = sweep_rates(policy, trace, rates, timer, capacity, options);
        for (const auto& p : points) {
          if (p.trim_warning) err << "warning: too few completions to trim warm-up at rate " << p.rate << "\n";
          add(fmt::format("{}", p.rate), p.metrics);
        }
      }
      detail::Sink sink(sm.out, out);
      table.write(sink.get(), ReportFormat::Csv);
    };
  });

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("infercost");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  try {
    if (action) action();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace infercost::cli
