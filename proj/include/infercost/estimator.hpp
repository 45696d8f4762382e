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

// Linear runtime model for whole-model prefill and decode steps.
//
//   T_prefill = alpha*bsh^2 l + beta*bshh' l + gamma*bs^2 n l
//             + eta*bsh l + lambda*bsh' l + mu
//   T_decode  = phi*bsh l + psi*bsn l + omega*bh l + nu
//
// Times are in milliseconds. Coefficients come either from published
// values or from an ordinary-least-squares fit over timing samples.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "infercost/arch.hpp"
#include "infercost/checked.hpp"
#include "infercost/error.hpp"

namespace infercost {

struct TimingSample {
  Phase phase = Phase::Prefill;
  std::int64_t batch = 1;
  std::int64_t seq_len = 1;
  double measured_ms = 0.0;
};

inline constexpr std::array<std::string_view, 6> kPrefillCoefficientNames = {"alpha", "beta",   "gamma",
                                                                             "eta",   "lambda", "mu"};
inline constexpr std::array<std::string_view, 4> kDecodeCoefficientNames = {"phi", "psi", "omega", "nu"};

inline std::size_t coefficient_count(Phase phase) {
  return phase == Phase::Prefill ? kPrefillCoefficientNames.size() : kDecodeCoefficientNames.size();
}

inline std::span<const std::string_view> coefficient_names(Phase phase) {
  if (phase == Phase::Prefill) return kPrefillCoefficientNames;
  return kDecodeCoefficientNames;
}

// Ordered as in coefficient_names(phase); the last entry is the intercept.
struct RegressionCoefficients {
  Phase phase = Phase::Prefill;
  std::vector<double> values;

  friend bool operator==(const RegressionCoefficients&, const RegressionCoefficients&) = default;
};

inline RegressionCoefficients make_coefficients(Phase phase, std::vector<double> values) {
  if (values.size() != coefficient_count(phase)) {
    throw DimensionMismatchError(std::string(to_string(phase)) + " coefficients need " +
                                 std::to_string(coefficient_count(phase)) + " values, got " +
                                 std::to_string(values.size()));
  }
  return {phase, std::move(values)};
}

namespace detail {

inline std::uint64_t as_count(std::int64_t v, const char* what) {
  if (v < 1) throw NonPositiveFieldError(std::string(what) + " must be >= 1");
  return static_cast<std::uint64_t>(v);
}

}  // namespace detail

// (bsh^2 l, bshh' l, bs^2 n l, bsh l, bsh' l, 1)
inline std::vector<double> prefill_features(const ModelConfig& cfg, std::int64_t batch, std::int64_t seq_len) {
  using checked::product;
  validate_config(cfg);
  const std::uint64_t b = detail::as_count(batch, "batch size");
  const std::uint64_t s = detail::as_count(seq_len, "sequence length");
  const auto h = static_cast<std::uint64_t>(cfg.hidden_size);
  const auto hp = static_cast<std::uint64_t>(cfg.intermediate_size);
  const auto n = static_cast<std::uint64_t>(cfg.num_heads);
  const auto l = static_cast<std::uint64_t>(cfg.num_layers);
  return {
      static_cast<double>(product({b, s, h, h, l})),
      static_cast<double>(product({b, s, h, hp, l})),
      static_cast<double>(product({b, s, s, n, l})),
      static_cast<double>(product({b, s, h, l})),
      static_cast<double>(product({b, s, hp, l})),
      1.0,
  };
}

// (bsh l, bsn l, bh l, 1); s is the cached length.
inline std::vector<double> decode_features(const ModelConfig& cfg, std::int64_t batch, std::int64_t seq_len) {
  using checked::product;
  validate_config(cfg);
  const std::uint64_t b = detail::as_count(batch, "batch size");
  const std::uint64_t s = detail::as_count(seq_len, "sequence length");
  const auto h = static_cast<std::uint64_t>(cfg.hidden_size);
  const auto n = static_cast<std::uint64_t>(cfg.num_heads);
  const auto l = static_cast<std::uint64_t>(cfg.num_layers);
  return {
      static_cast<double>(product({b, s, h, l})),
      static_cast<double>(product({b, s, n, l})),
      static_cast<double>(product({b, h, l})),
      1.0,
  };
}

inline std::vector<double> features(Phase phase, const ModelConfig& cfg, std::int64_t batch, std::int64_t seq_len) {
  return phase == Phase::Prefill ? prefill_features(cfg, batch, seq_len) : decode_features(cfg, batch, seq_len);
}

inline double predict(const RegressionCoefficients& coeffs, std::span<const double> feature_vector) {
  if (feature_vector.size() != coeffs.values.size()) {
    throw DimensionMismatchError("feature vector has " + std::to_string(feature_vector.size()) +
                                 " entries but " + std::string(to_string(coeffs.phase)) + " coefficients have " +
                                 std::to_string(coeffs.values.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < feature_vector.size(); ++i) total += coeffs.values[i] * feature_vector[i];
  return total;
}

inline double predict(const RegressionCoefficients& coeffs, const ModelConfig& cfg, std::int64_t batch,
                      std::int64_t seq_len) {
  return predict(coeffs, features(coeffs.phase, cfg, batch, seq_len));
}

// What to do when the design matrix is numerically rank deficient. With a
// single model config the prefill features bsh^2 l, bshh' l, bsh l and
// bsh' l are all proportional to b*s, so fits over one architecture
// need MinimumNorm to produce coefficients at all.
enum class RankPolicy { Reject, MinimumNorm };

struct FitOptions {
  RankPolicy rank_policy = RankPolicy::Reject;
  // Smallest accepted ratio of singular values of the column-normalized
  // design matrix.
  double rank_tolerance = 1e-10;
};

struct FitDiagnostics {
  double rms_relative_error = 0.0;
  bool condition_warning = false;
  std::size_t rank = 0;
  double singular_value_ratio = 0.0;  // sigma_min / sigma_max, column-normalized
};

struct FitResult {
  RegressionCoefficients coefficients;
  FitDiagnostics diagnostics;
};

/// Ordinary least squares over an explicit design matrix (one row of
/// features per sample). Columns are scaled to unit norm before the SVD so
/// that the rank test is independent of feature magnitudes, which span
/// ~12 decades for real model sizes.
inline FitResult fit_design(Phase phase, std::span<const std::vector<double>> rows, std::span<const double> targets,
                            const FitOptions& options = {}) {
  const std::size_t k = coefficient_count(phase);
  if (rows.size() != targets.size()) {
    throw DimensionMismatchError("design has " + std::to_string(rows.size()) + " rows but " +
                                 std::to_string(targets.size()) + " targets");
  }
  if (rows.size() < k) {
    throw UnderdeterminedError(std::string(to_string(phase)) + " fit needs at least " + std::to_string(k) +
                               " samples, got " + std::to_string(rows.size()));
  }
  const auto m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd design(m, static_cast<Eigen::Index>(k));
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (row.size() != k) {
      throw DimensionMismatchError("design row " + std::to_string(i) + " has " + std::to_string(row.size()) +
                                   " features, expected " + std::to_string(k));
    }
    for (std::size_t j = 0; j < k; ++j) design(i, static_cast<Eigen::Index>(j)) = row[j];
    y(i) = targets[static_cast<std::size_t>(i)];
  }

  Eigen::VectorXd scale = design.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < scale.size(); ++j) {
    if (scale(j) == 0.0) scale(j) = 1.0;
  }
  const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double ratio = sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0;
  std::size_t rank = 0;
  for (Eigen::Index j = 0; j < sv.size(); ++j) {
    if (sv(j) > options.rank_tolerance * sv(0)) ++rank;
  }

  FitDiagnostics diag;
  diag.rank = rank;
  diag.singular_value_ratio = ratio;
  if (rank < k) {
    if (options.rank_policy == RankPolicy::Reject) {
      throw RankDeficientError("design matrix has numerical rank " + std::to_string(rank) + " of " +
                               std::to_string(k) + " (singular value ratio " + std::to_string(ratio) + ")");
    }
    diag.condition_warning = true;
  } else if (ratio < 1e-7) {
    diag.condition_warning = true;
  }

  svd.setThreshold(options.rank_tolerance);
  const Eigen::VectorXd scaled_solution = svd.solve(y);
  const Eigen::VectorXd solution = scaled_solution.cwiseQuotient(scale);

  RegressionCoefficients coeffs{phase, std::vector<double>(solution.data(), solution.data() + solution.size())};

  double sq = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double fitted = predict(coeffs, rows[static_cast<std::size_t>(i)]);
    const double rel = (fitted - y(i)) / y(i);
    sq += rel * rel;
  }
  diag.rms_relative_error = std::sqrt(sq / static_cast<double>(m));
  return {std::move(coeffs), diag};
}

/// Fits the phase's coefficients from whole-model timing samples of one
/// architecture.
inline FitResult fit(std::span<const TimingSample> samples, const ModelConfig& cfg, Phase phase,
                     const FitOptions& options = {}) {
  std::vector<std::vector<double>> rows;
  std::vector<double> targets;
  rows.reserve(samples.size());
  targets.reserve(samples.size());
  for (const auto& sample : samples) {
    if (sample.phase != phase) {
      throw Error("timing sample phase '" + std::string(to_string(sample.phase)) + "' does not match fit phase '" +
                  std::string(to_string(phase)) + "'");
    }
    if (!(sample.measured_ms > 0.0)) throw NonPositiveFieldError("timing sample measured_ms must be > 0");
    rows.push_back(features(phase, cfg, sample.batch, sample.seq_len));
    targets.push_back(sample.measured_ms);
  }
  return fit_design(phase, rows, targets, options);
}

}  // namespace infercost
