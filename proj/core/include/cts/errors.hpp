// Copyright 2026 The cts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace cts {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CTS_DECLARE_ERROR(Name)          \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  };

CTS_DECLARE_ERROR(LabelCollision)
CTS_DECLARE_ERROR(UnknownLabel)
CTS_DECLARE_ERROR(NotAPermutation)
CTS_DECLARE_ERROR(BadDimension)
CTS_DECLARE_ERROR(ShapeMismatch)
CTS_DECLARE_ERROR(LabelMismatch)
CTS_DECLARE_ERROR(DimMismatch)
CTS_DECLARE_ERROR(MalformedNetwork)
CTS_DECLARE_ERROR(IndexOutOfRange)
CTS_DECLARE_ERROR(InvalidInput)
CTS_DECLARE_ERROR(BadState)
CTS_DECLARE_ERROR(SpecMismatch)
CTS_DECLARE_ERROR(ParseError)

#undef CTS_DECLARE_ERROR

/// Thrown when a contraction plan would materialize an intermediate operator
/// larger than the configured cap. Carries the rendered plan for diagnostics.
class ContractTooLarge : public Error {
 public:
  ContractTooLarge(const std::string& what, std::string plan)
      : Error(what), plan_(std::move(plan)) {}
  const std::string& plan() const { return plan_; }

 private:
  std::string plan_;
};

}  // namespace cts
