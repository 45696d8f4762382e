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
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "infercost/error.hpp"

namespace infercost {

struct Request {
  std::int64_t id = 0;
  std::int64_t input_len = 1;
  std::int64_t output_len = 1;
  double arrival_time_s = 0.0;

  friend bool operator==(const Request&, const Request&) = default;
};

enum class Scenario { ShortToShort, ShortToLong, ShortTo16k, LongToShort };

struct LengthRange {
  std::int64_t min;
  std::int64_t max;
};

// Uniform length bounds, inclusive.
struct ScenarioBounds {
  LengthRange input;
  LengthRange output;
  std::int64_t default_count;
};

inline ScenarioBounds bounds(Scenario scenario) {
  switch (scenario) {
    case Scenario::ShortToShort: return {{1, 50}, {1, 50}, 1000};
    case Scenario::ShortToLong: return {{1, 50}, {51, 1000}, 1000};
    case Scenario::ShortTo16k: return {{1, 50}, {16000, 16000}, 80};
    case Scenario::LongToShort: return {{1100, 1500}, {1, 120}, 1000};
  }
  return {{1, 1}, {1, 1}, 1};
}

inline std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::ShortToShort: return "s2s";
    case Scenario::ShortToLong: return "s2l";
    case Scenario::ShortTo16k: return "s16k";
    case Scenario::LongToShort: return "l2s";
  }
  return "unknown";
}

inline std::optional<Scenario> parse_scenario(std::string_view text) {
  if (text == "s2s") return Scenario::ShortToShort;
  if (text == "s2l") return Scenario::ShortToLong;
  if (text == "s16k" || text == "s-16k") return Scenario::ShortTo16k;
  if (text == "l2s") return Scenario::LongToShort;
  return std::nullopt;
}

/// n synthetic requests with lengths drawn uniformly inside the scenario's
/// bounds. Pure in (scenario, n, seed); all arrivals at t = 0.
inline std::vector<Request> generate(Scenario scenario, std::size_t n, std::uint64_t seed) {
  const auto b = bounds(scenario);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> input(b.input.min, b.input.max);
  std::uniform_int_distribution<std::int64_t> output(b.output.min, b.output.max);
  std::vector<Request> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Request r;
    r.id = static_cast<std::int64_t>(i);
    r.input_len = input(rng);
    r.output_len = output(rng);
    out.push_back(r);
  }
  return out;
}

namespace detail {

inline std::int64_t read_length(const nlohmann::json& obj, const char* key, std::size_t line) {
  if (!obj.contains(key)) throw ParseError(std::string("missing '") + key + "'", line);
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ParseError(std::string("'") + key + "' must be an integer", line);
  const auto value = v.get<std::int64_t>();
  if (value < 1) throw BoundsError(std::string("'") + key + "' must be >= 1, got " + std::to_string(value), line);
  return value;
}

}  // namespace detail

// JSON lines: {"input_tokens": int, "output_tokens": int, "arrival_s": number?}
// Blank lines are skipped; ids follow record order.
inline std::vector<Request> read_trace(std::istream& in) {
  std::vector<Request> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line);
    }
    if (!obj.is_object()) throw ParseError("expected a JSON object", line);
    Request r;
    r.id = static_cast<std::int64_t>(out.size());
    r.input_len = detail::read_length(obj, "input_tokens", line);
    r.output_len = detail::read_length(obj, "output_tokens", line);
    if (obj.contains("arrival_s")) {
      const auto& a = obj.at("arrival_s");
      if (!a.is_number()) throw ParseError("'arrival_s' must be a number", line);
      r.arrival_time_s = a.get<double>();
      if (!(r.arrival_time_s >= 0.0)) throw BoundsError("'arrival_s' must be >= 0", line);
    }
    out.push_back(r);
  }
  return out;
}

inline std::vector<Request> load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trace file '" + path + "'");
  return read_trace(in);
}

inline void write_trace(std::ostream& out, const std::vector<Request>& trace) {
  for (const auto& r : trace) {
    nlohmann::ordered_json obj;
    obj["input_tokens"] = r.input_len;
    obj["output_tokens"] = r.output_len;
    obj["arrival_s"] = r.arrival_time_s;
    out << obj.dump() << '\n';
  }
}

}  // namespace infercost
