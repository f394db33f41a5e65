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

#include "qfdiv/error.hpp"

namespace qfdiv {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonHermitian: return "NonHermitian";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::NonRealResult: return "NonRealResult";
    case ErrorKind::OptimizerDiverged: return "OptimizerDiverged";
    case ErrorKind::NotAntiMonotone: return "NotAntiMonotone";
    case ErrorKind::BadParameter: return "BadParameter";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, std::string op, const std::string &message)
    : std::runtime_error(op + ": " + message), kind_(kind), op_(std::move(op)) {}

}  // namespace qfdiv
