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
#include <initializer_list>

#include "infercost/error.hpp"

namespace infercost {

// Exact unsigned 64-bit counting. Every product and sum of the cost model
// goes through these so a count that does not fit is reported instead of
// silently wrapping.
namespace checked {

inline std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw OverflowError("integer overflow in cost arithmetic");
  }
  return out;
}

inline std::uint64_t add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw OverflowError("integer overflow in cost arithmetic");
  }
  return out;
}

inline std::uint64_t product(std::initializer_list<std::uint64_t> factors) {
  std::uint64_t out = 1;
  for (auto f : factors) out = mul(out, f);
  return out;
}

inline std::uint64_t sum(std::initializer_list<std::uint64_t> terms) {
  std::uint64_t out = 0;
  for (auto t : terms) out = add(out, t);
  return out;
}

}  // namespace checked
}  // namespace infercost
