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

#include <stdexcept>
#include <string>

namespace infercost {

// Root of every error the library throws. Callers that only need a
// diagnostic line can catch this and print what().
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatchError : public Error {
 public:
  explicit DimensionMismatchError(const std::string& what) : Error("dimension mismatch: " + what) {}
};

class NonPositiveFieldError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

class DegenerateCostError : public Error {
 public:
  using Error::Error;
};

class UnderdeterminedError : public Error {
 public:
  using Error::Error;
};

class RankDeficientError : public Error {
 public:
  using Error::Error;
};

class ReservedOverflowError : public Error {
 public:
  using Error::Error;
};

class CapacityInfeasibleError : public Error {
 public:
  using Error::Error;
};

class MissingCoefficientsError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. Line numbers are 1-based; 0 means "whole file".
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class BoundsError : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace infercost
