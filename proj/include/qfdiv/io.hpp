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

#include <json.hpp>
#include <optional>
#include <string>

#include "qfdiv/fdiv.hpp"
#include "qfdiv/superop.hpp"

namespace qfdiv {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

/// Row-major nested arrays of [re, im] pairs.
json matrix_to_json(const CMatrix &m);
/// Throws ParseError naming the JSON path of the first malformed element.
CMatrix matrix_from_json(const json &j, const std::string &path = "$");
HermMatrix herm_from_json(const json &j, const std::string &path = "$");

/// Inline channel payloads: a zoo grammar string, {"kraus": [...]} or
/// {"choi": M, "dim_in": a, "dim_out": b}.
json map_to_json(const MapSpec &phi);
MapSpec map_from_json(const json &j, int dim_hint, const std::string &path = "$");

/// Parsed contents of an instance file (schema version 1).
struct InstanceFile {
  int version = kFormatVersion;
  int dim_a = 0;
  int dim_b = 0;
  HermMatrix x = HermMatrix::identity(1);
  HermMatrix y = HermMatrix::identity(1);
  std::optional<HermMatrix> tau;
  std::optional<HermMatrix> omega;
  std::optional<json> channel;  // kept as written so serialization is stable
  std::optional<std::string> f;
};

InstanceFile instance_from_json(const json &j);
json instance_to_json(const InstanceFile &inst);
/// Reads and parses a file; syntax errors become ParseError with a byte offset.
json read_json_file(const std::string &path);

}  // namespace qfdiv
