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

// File formats: model config JSON, hardware JSON, coefficient JSON and
// timing-sample CSV.

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "infercost/arch.hpp"
#include "infercost/error.hpp"
#include "infercost/estimator.hpp"
#include "infercost/hardware.hpp"

namespace infercost::io {

using nlohmann::json;
using nlohmann::ordered_json;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(what + ": invalid JSON: " + e.what());
  }
}

namespace detail {

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& what) {
  if (!obj.is_object()) throw ParseError(what + ": expected a JSON object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ParseError(what + ": unknown key '" + key + "'");
  }
}

inline std::int64_t get_int(const json& obj, const char* key, const std::string& what) {
  if (!obj.contains(key)) throw ParseError(what + ": missing '" + std::string(key) + "'");
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ParseError(what + ": '" + std::string(key) + "' must be an integer");
  return v.get<std::int64_t>();
}

inline double get_number(const json& obj, const char* key, const std::string& what) {
  if (!obj.contains(key)) throw ParseError(what + ": missing '" + std::string(key) + "'");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ParseError(what + ": '" + std::string(key) + "' must be a number");
  return v.get<double>();
}

// Decimal-unit quantity to an exact integer count of base units.
inline std::uint64_t to_base_units(double value, double scale, const char* key, const std::string& what) {
  const double base = std::round(value * scale);
  if (!(base > 0.0) || base >= 1.8e19) {
    throw NonPositiveFieldError(what + ": '" + std::string(key) + "' must be positive and representable");
  }
  return static_cast<std::uint64_t>(base);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Model config
// ---------------------------------------------------------------------------

inline ModelConfig model_from_json(const json& obj, const std::string& what = "model config") {
  detail::reject_unknown_keys(obj,
                              {"hidden_size", "intermediate_size", "num_heads", "head_dim", "num_layers",
                               "bytes_per_scalar"},
                              what);
  ModelConfig cfg;
  cfg.hidden_size = detail::get_int(obj, "hidden_size", what);
  cfg.intermediate_size = detail::get_int(obj, "intermediate_size", what);
  cfg.num_heads = detail::get_int(obj, "num_heads", what);
  cfg.head_dim = detail::get_int(obj, "head_dim", what);
  cfg.num_layers = detail::get_int(obj, "num_layers", what);
  if (obj.contains("bytes_per_scalar")) cfg.bytes_per_scalar = detail::get_int(obj, "bytes_per_scalar", what);
  return validate_config(cfg);
}

inline ordered_json model_to_json(const ModelConfig& cfg) {
  ordered_json obj;
  obj["hidden_size"] = cfg.hidden_size;
  obj["intermediate_size"] = cfg.intermediate_size;
  obj["num_heads"] = cfg.num_heads;
  obj["head_dim"] = cfg.head_dim;
  obj["num_layers"] = cfg.num_layers;
  obj["bytes_per_scalar"] = cfg.bytes_per_scalar;
  return obj;
}

// Preset name or path to a JSON file.
inline ModelConfig load_model(const std::string& name_or_path) {
  if (auto preset = presets::model(name_or_path)) return *preset;
  return model_from_json(parse_json(read_file(name_or_path), name_or_path), name_or_path);
}

// ---------------------------------------------------------------------------
// Hardware: {name, memory_gb, bandwidth_gb_per_s, bf16_tflops}, GB = 1e9 B,
// TFLOPs = 1e12 FLOP/s.
// ---------------------------------------------------------------------------

inline HardwareSpec hardware_from_json(const json& obj, const std::string& what = "hardware") {
  detail::reject_unknown_keys(obj, {"name", "memory_gb", "bandwidth_gb_per_s", "bf16_tflops"}, what);
  HardwareSpec hw;
  if (!obj.contains("name") || !obj.at("name").is_string()) throw ParseError(what + ": 'name' must be a string");
  hw.name = obj.at("name").get<std::string>();
  hw.memory_bytes = detail::to_base_units(detail::get_number(obj, "memory_gb", what), 1e9, "memory_gb", what);
  hw.bandwidth_bytes_per_s =
      detail::to_base_units(detail::get_number(obj, "bandwidth_gb_per_s", what), 1e9, "bandwidth_gb_per_s", what);
  hw.peak_flops_per_s = detail::to_base_units(detail::get_number(obj, "bf16_tflops", what), 1e12, "bf16_tflops", what);
  return hw;
}

inline ordered_json hardware_to_json(const HardwareSpec& hw) {
  ordered_json obj;
  obj["name"] = hw.name;
  obj["memory_gb"] = static_cast<double>(hw.memory_bytes) / 1e9;
  obj["bandwidth_gb_per_s"] = static_cast<double>(hw.bandwidth_bytes_per_s) / 1e9;
  obj["bf16_tflops"] = static_cast<double>(hw.peak_flops_per_s) / 1e12;
  return obj;
}

inline HardwareSpec load_hardware(const std::string& name_or_path) {
  if (auto preset = presets::hardware(name_or_path)) return *preset;
  return hardware_from_json(parse_json(read_file(name_or_path), name_or_path), name_or_path);
}

// ---------------------------------------------------------------------------
// Coefficients: {"phase": "prefill", "alpha": ..., ..., "mu": ...}
// ---------------------------------------------------------------------------

inline RegressionCoefficients coefficients_from_json(const json& obj, const std::string& what = "coefficients") {
  if (!obj.is_object()) throw ParseError(what + ": expected a JSON object");
  if (!obj.contains("phase") || !obj.at("phase").is_string()) throw ParseError(what + ": missing 'phase'");
  const auto phase = parse_phase(obj.at("phase").get<std::string>());
  if (!phase) throw ParseError(what + ": 'phase' must be prefill or decode");
  std::vector<double> values;
  for (auto name : coefficient_names(*phase)) {
    const std::string key(name);
    values.push_back(detail::get_number(obj, key.c_str(), what));
  }
  for (const auto& [key, _] : obj.items()) {
    if (key == "phase") continue;
    bool known = false;
    for (auto name : coefficient_names(*phase)) known = known || key == name;
    if (!known) throw ParseError(what + ": unknown key '" + key + "' for " + std::string(to_string(*phase)));
  }
  return make_coefficients(*phase, std::move(values));
}

inline ordered_json coefficients_to_json(const RegressionCoefficients& coeffs) {
  ordered_json obj;
  obj["phase"] = std::string(to_string(coeffs.phase));
  const auto names = coefficient_names(coeffs.phase);
  for (std::size_t i = 0; i < names.size() && i < coeffs.values.size(); ++i) {
    obj[std::string(names[i])] = coeffs.values[i];
  }
  return obj;
}

inline RegressionCoefficients load_coefficients(const std::string& path) {
  return coefficients_from_json(parse_json(read_file(path), path), path);
}

// Both phases of one runtime model, e.g. one row pair of a published
// coefficient table: {"prefill": {...}, "decode": {...}}.
struct CoefficientPair {
  RegressionCoefficients prefill;
  RegressionCoefficients decode;
};

inline CoefficientPair coefficient_pair_from_json(const json& obj, const std::string& what) {
  if (!obj.is_object() || !obj.contains("prefill") || !obj.contains("decode")) {
    throw MissingCoefficientsError(what + ": needs both 'prefill' and 'decode' coefficient objects");
  }
  auto prefill = coefficients_from_json(obj.at("prefill"), what + ".prefill");
  auto decode = coefficients_from_json(obj.at("decode"), what + ".decode");
  if (prefill.phase != Phase::Prefill || decode.phase != Phase::Decode) {
    throw MissingCoefficientsError(what + ": phase labels do not match their slots");
  }
  return {std::move(prefill), std::move(decode)};
}

// Table file keyed by library: {"transformers": {"prefill": ..., "decode": ...}, ...}
inline std::map<std::string, CoefficientPair> load_coefficient_table(const std::string& path) {
  const auto obj = parse_json(read_file(path), path);
  if (!obj.is_object()) throw ParseError(path + ": expected a JSON object");
  std::map<std::string, CoefficientPair> out;
  for (const auto& [name, entry] : obj.items()) out.emplace(name, coefficient_pair_from_json(entry, path + ":" + name));
  return out;
}

// ---------------------------------------------------------------------------
// Timing samples CSV: header `phase,b,s,time_ms`
// ---------------------------------------------------------------------------

inline std::vector<TimingSample> read_timing_samples(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError("timing CSV is empty");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "phase,b,s,time_ms") throw ParseError("timing CSV header must be 'phase,b,s,time_ms'", lineno);
  std::vector<TimingSample> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) throw ParseError("expected 4 columns, got " + std::to_string(cells.size()), lineno);
    const auto phase = parse_phase(cells[0]);
    if (!phase) throw ParseError("phase must be prefill or decode", lineno);
    TimingSample sample;
    sample.phase = *phase;
    try {
      std::size_t used = 0;
      sample.batch = std::stoll(cells[1], &used);
      if (used != cells[1].size()) throw std::invalid_argument("b");
      sample.seq_len = std::stoll(cells[2], &used);
      if (used != cells[2].size()) throw std::invalid_argument("s");
      sample.measured_ms = std::stod(cells[3], &used);
      if (used != cells[3].size()) throw std::invalid_argument("time_ms");
    } catch (const std::exception&) {
      throw ParseError("malformed number", lineno);
    }
    if (sample.batch < 1 || sample.seq_len < 1) throw BoundsError("b and s must be >= 1", lineno);
    if (!(sample.measured_ms > 0.0)) throw BoundsError("time_ms must be > 0", lineno);
    out.push_back(sample);
  }
  return out;
}

inline std::vector<TimingSample> load_timing_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return read_timing_samples(in);
}

}  // namespace infercost::io
