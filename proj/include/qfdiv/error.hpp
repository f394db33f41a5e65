// Copyright 2026 The qfdiv Authors
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
#include <string_view>

namespace qfdiv {

enum class ErrorKind {
  NonHermitian,
  NoConvergence,
  NotPositiveDefinite,
  NotPSD,
  DimMismatch,
  NonRealResult,
  OptimizerDiverged,
  NotAntiMonotone,
  BadParameter,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

// Every numeric precondition failure in the library surfaces as this type.
// `op` names the operation that rejected its input so the CLI can report it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string op, const std::string &message);

  ErrorKind kind() const { return kind_; }
  const std::string &op() const { return op_; }

 private:
  ErrorKind kind_;
  std::string op_;
};

}  // namespace qfdiv
