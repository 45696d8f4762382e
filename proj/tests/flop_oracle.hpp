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

// Test-only FLOP oracle: runs a literal LLaMA decoder layer forward pass on
// a scalar type that counts every arithmetic operation it takes part in.
// Shares no code with the closed-form cost model.
//
// Counting conventions:
//   * a dot product of length k is k multiplies + k adds (accumulating
//     into zero counts as an add)
//   * a RoPE rotation of one pair is 4 multiplies + 2 adds
//   * scale, exp, row-sum and normalize each count 1 per attention score
//   * Swish is 1 op per element, the gating multiply 1 more
//   * Add&Norm is residual add, square, accumulate, scale by the inverse
//     RMS, scale by the gain: 5 per element. Per-row scalar work (the mean,
//     the square root) is not counted.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace infercost::oracle {

struct OpCounter {
  std::uint64_t ops = 0;
};

inline OpCounter*& active_counter() {
  static thread_local OpCounter* counter = nullptr;
  return counter;
}

inline void tick(std::uint64_t n = 1) {
  if (auto* c = active_counter()) c->ops += n;
}

// Value wrapper whose arithmetic is counted.
struct Counted {
  double v = 0.0;
};

inline Counted operator+(Counted a, Counted b) { tick(); return {a.v + b.v}; }
inline Counted operator*(Counted a, Counted b) { tick(); return {a.v * b.v}; }
inline Counted operator-(Counted a, Counted b) { tick(); return {a.v - b.v}; }
inline Counted operator/(Counted a, Counted b) { tick(); return {a.v / b.v}; }
inline Counted counted_exp(Counted a) { tick(); return {std::exp(a.v)}; }
inline Counted counted_swish(Counted a) { tick(); return {a.v / (1.0 + std::exp(-a.v))}; }
// Uncounted per-row scalar work.
inline Counted free_rsqrt(Counted a) { return {1.0 / std::sqrt(a.v)}; }

using Matrix = std::vector<std::vector<Counted>>;  // rows x cols

struct TinyLayer {
  int h, hp, n, d;
};

class CountedForward {
 public:
  explicit CountedForward(TinyLayer dims) : dims_(dims) {}

  // Per-op operation counts for a prefill of `batch` sequences of
  // `seq_len` tokens, keyed by op name.
  std::map<std::string, std::uint64_t> prefill(int batch, int seq_len) {
    counts_.clear();
    const int h = dims_.h, hp = dims_.hp;
    for (int b = 0; b < batch; ++b) {
      Matrix x = filled(seq_len, h, 0.1);
      Matrix wq = filled(h, h, 0.01), wk = filled(h, h, 0.02), wv = filled(h, h, 0.03), wo = filled(h, h, 0.04);
      Matrix wg = filled(h, hp, 0.05), wu = filled(h, hp, 0.06), wd = filled(hp, h, 0.07);
      std::vector<Counted> gain(static_cast<std::size_t>(h), Counted{1.0});

      Matrix q, k, v;
      measure("qkv_proj", [&] {
        q = matmul(x, wq);
        k = matmul(x, wk);
        v = matmul(x, wv);
      });
      measure("rope", [&] {
        rope(q);
        rope(k);
      });
      Matrix o;
      measure("attention", [&] { o = attention(q, k, v); });
      Matrix proj;
      measure("out_proj", [&] { proj = matmul(o, wo); });
      Matrix x1;
      measure("add_norm_attn", [&] { x1 = add_norm(x, proj, gain); });
      Matrix g, u;
      measure("gate_up_proj", [&] {
        g = matmul(x1, wg);
        u = matmul(x1, wu);
      });
      Matrix dact;
      measure("swish_mul", [&] { dact = swish_mul(g, u); });
      Matrix down;
      measure("down_proj", [&] { down = matmul(dact, wd); });
      measure("add_norm_ffn", [&] { (void)add_norm(x1, down, gain); });
    }
    return counts_;
  }

 private:
  template <typename F>
  void measure(const std::string& name, F&& body) {
    OpCounter counter;
    active_counter() = &counter;
    body();
    active_counter() = nullptr;
    counts_[name] += counter.ops;
  }

  static Matrix filled(int rows, int cols, double base) {
    Matrix m(static_cast<std::size_t>(rows), std::vector<Counted>(static_cast<std::size_t>(cols)));
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m[i][j] = Counted{base * (1 + (i * 7 + j * 3) % 5)};
    return m;
  }

  static Matrix matmul(const Matrix& a, const Matrix& b) {
    const std::size_t rows = a.size(), inner = b.size(), cols = b[0].size();
    Matrix out(rows, std::vector<Counted>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        Counted acc{0.0};
        for (std::size_t t = 0; t < inner; ++t) acc = acc + a[i][t] * b[t][j];
        out[i][j] = acc;
      }
    }
    return out;
  }

  void rope(Matrix& m) const {
    for (std::size_t pos = 0; pos < m.size(); ++pos) {
      for (int head = 0; head < dims_.n; ++head) {
        for (int p = 0; p < dims_.d / 2; ++p) {
          const auto i = static_cast<std::size_t>(head * dims_.d + 2 * p);
          const double theta = static_cast<double>(pos) * std::pow(10000.0, -2.0 * p / dims_.d);
          const Counted c{std::cos(theta)}, s{std::sin(theta)};
          const Counted x1 = m[pos][i], x2 = m[pos][i + 1];
          m[pos][i] = x1 * c - x2 * s;
          m[pos][i + 1] = x1 * s + x2 * c;
        }
      }
    }
  }

  // Plain (non-causal-masked) scaled dot-product attention per head.
  Matrix attention(const Matrix& q, const Matrix& k, const Matrix& v) const {
    const std::size_t s = q.size();
    const int d = dims_.d;
    Matrix out(s, std::vector<Counted>(static_cast<std::size_t>(dims_.h)));
    const Counted scale{std::sqrt(static_cast<double>(d))};
    for (int head = 0; head < dims_.n; ++head) {
      const auto off = static_cast<std::size_t>(head * d);
      for (std::size_t i = 0; i < s; ++i) {
        std::vector<Counted> scores(s);
        for (std::size_t j = 0; j < s; ++j) {
          Counted acc{0.0};
          for (int t = 0; t < d; ++t) acc = acc + q[i][off + t] * k[j][off + t];
          scores[j] = acc;
        }
        Counted total{0.0};
        for (auto& sc : scores) {
          sc = counted_exp(sc / scale);
          total = total + sc;
        }
        for (auto& sc : scores) sc = sc / total;
        for (int t = 0; t < d; ++t) {
          Counted acc{0.0};
          for (std::size_t j = 0; j < s; ++j) acc = acc + scores[j] * v[j][off + t];
          out[i][off + t] = acc;
        }
      }
    }
    return out;
  }

  static Matrix add_norm(const Matrix& residual, const Matrix& x, const std::vector<Counted>& gain) {
    Matrix out = residual;
    for (std::size_t i = 0; i < residual.size(); ++i) {
      Counted sumsq{0.0};
      for (std::size_t j = 0; j < residual[i].size(); ++j) {
        out[i][j] = residual[i][j] + x[i][j];
        sumsq = sumsq + out[i][j] * out[i][j];
      }
      const Counted inv = free_rsqrt(Counted{sumsq.v / static_cast<double>(residual[i].size())});
      for (std::size_t j = 0; j < residual[i].size(); ++j) out[i][j] = out[i][j] * inv * gain[j];
    }
    return out;
  }

  static Matrix swish_mul(const Matrix& g, const Matrix& u) {
    Matrix out = g;
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j < g[i].size(); ++j) out[i][j] = counted_swish(g[i][j]) * u[i][j];
    return out;
  }

  TinyLayer dims_;
  std::map<std::string, std::uint64_t> counts_;
};

}  // namespace infercost::oracle
