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

// Report builders shared by the command-line front end: per-op analysis
// tables, roofline CSV and a static SVG roofline scatter.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "infercost/costmodel.hpp"
#include "infercost/hardware.hpp"
#include "infercost/report.hpp"

namespace infercost {

inline std::vector<OpCost> layer_costs(const ModelConfig& cfg, const WorkloadPoint& point, CacheScheme scheme) {
  validate_workload(point);
  return point.phase == Phase::Prefill ? prefill_op_costs(cfg, point.batch_size, point.seq_len)
                                       : decode_op_costs(cfg, point.batch_size, point.seq_len, scheme);
}

/// One row per op of one layer plus a whole-model totals row.
inline ReportTable analysis_table(const ModelConfig& cfg, const HardwareSpec& hw, const WorkloadPoint& point,
                                  CacheScheme scheme) {
  const auto costs = layer_costs(cfg, point, scheme);
  const auto total = aggregate(costs, cfg);

  std::string title = fmt::format("{} per decoder layer, b={}, s={}, {}", to_string(point.phase), point.batch_size,
                                  point.seq_len, hw.name);
  if (point.phase == Phase::Decode) title += fmt::format(", {} cache", to_string(scheme));
  ReportTable table(std::move(title), {"op", "flops", "mops_bytes", "arithmetic_intensity", "bound", "lower_bound_ms"});

  double total_ms = 0.0;
  for (const auto& c : costs) {
    const double ms = lower_bound_time(c, hw) * 1e3;
    total_ms += ms;
    table.add_row({std::string(to_string(c.kind)), c.flops, c.mops, c.arithmetic_intensity,
                   std::string(to_string(classify(c, hw))), ms});
  }
  const auto layers = static_cast<double>(cfg.num_layers);
  const BoundKind total_bound =
      total.arithmetic_intensity() > ridge_point(hw) ? BoundKind::ComputeBound : BoundKind::MemoryBound;
  table.add_row({fmt::format("total_x{}_layers", cfg.num_layers), total.total_flops, total.total_mops,
                 total.arithmetic_intensity(), std::string(to_string(total_bound)), total_ms * layers});
  return table;
}

inline ReportTable roofline_table(std::span<const OpCost> costs, const HardwareSpec& hw) {
  ReportTable table("roofline " + hw.name, {"op", "arithmetic_intensity", "attainable_flops_per_s", "ridge_point"});
  const double ridge = ridge_point(hw);
  for (const auto& c : costs) {
    table.add_row({std::string(to_string(c.kind)), c.arithmetic_intensity, attainable_flops(c.arithmetic_intensity, hw),
                   ridge});
  }
  return table;
}

inline void write_roofline_csv(std::ostream& out, std::span<const OpCost> costs, const HardwareSpec& hw) {
  roofline_table(costs, hw).write(out, ReportFormat::Csv);
}

/// Log-log scatter of attainable performance against arithmetic intensity,
/// with the roof polyline and a vertical line at the ridge. Ops with zero
/// intensity cannot be placed on a log axis and are omitted.
inline void write_roofline_svg(std::ostream& out, std::span<const OpCost> costs, const HardwareSpec& hw) {
  constexpr double kWidth = 640, kHeight = 420, kLeft = 70, kRight = 20, kTop = 30, kBottom = 50;
  const double ridge = ridge_point(hw);
  const double peak = static_cast<double>(hw.peak_flops_per_s);

  double ai_min = ridge / 100.0, ai_max = ridge * 100.0;
  for (const auto& c : costs) {
    if (c.arithmetic_intensity <= 0.0) continue;
    ai_min = std::min(ai_min, c.arithmetic_intensity / 2.0);
    ai_max = std::max(ai_max, c.arithmetic_intensity * 2.0);
  }
  const double lx0 = std::log10(ai_min), lx1 = std::log10(ai_max);
  const double ly1 = std::log10(peak * 2.0);
  const double ly0 = std::log10(attainable_flops(ai_min, hw)) - 0.3;
  const auto px = [&](double ai) { return kLeft + (std::log10(ai) - lx0) / (lx1 - lx0) * (kWidth - kLeft - kRight); };
  const auto py = [&](double f) {
    return kHeight - kBottom - (std::log10(f) - ly0) / (ly1 - ly0) * (kHeight - kTop - kBottom);
  };

  out << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">)", kWidth,
                     kHeight, kWidth, kHeight)
      << '\n';
  out << fmt::format(R"(<title>Roofline {}</title>)", hw.name) << '\n';
  out << fmt::format(R"(<rect x="0" y="0" width="{}" height="{}" fill="white"/>)", kWidth, kHeight) << '\n';
  out << fmt::format(R"(<polyline fill="none" stroke="black" stroke-width="2" points="{:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f}"/>)",
                     px(ai_min), py(attainable_flops(ai_min, hw)), px(ridge), py(peak), px(ai_max), py(peak))
      << '\n';
  out << fmt::format(R"(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="gray" stroke-dasharray="4 4"/>)",
                     px(ridge), static_cast<double>(kTop), px(ridge), kHeight - kBottom)
      << '\n';
  out << fmt::format(R"(<text x="{:.2f}" y="{:.2f}" font-size="11">ridge {:.2f} FLOP/B</text>)", px(ridge) + 4,
                     kTop + 12, ridge)
      << '\n';
  for (const auto& c : costs) {
    if (c.arithmetic_intensity <= 0.0) continue;
    const double x = px(c.arithmetic_intensity);
    const double y = py(attainable_flops(c.arithmetic_intensity, hw));
    out << fmt::format(R"(<circle cx="{:.2f}" cy="{:.2f}" r="4" fill="steelblue"><title>{}</title></circle>)", x, y,
                       to_string(c.kind))
        << '\n';
  }
  out << fmt::format(R"(<text x="{:.2f}" y="{:.2f}" font-size="12">arithmetic intensity (FLOP/byte, log)</text>)",
                     kLeft, kHeight - 15)
      << '\n';
  out << fmt::format(R"svg(<text x="12" y="{:.2f}" font-size="12" transform="rotate(-90 12 {:.2f})">attainable FLOP/s (log)</text>)svg",
                     kHeight / 2, kHeight / 2)
      << '\n';
  out << "</svg>\n";
}

}  // namespace infercost
