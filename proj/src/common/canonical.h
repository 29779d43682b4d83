// Copyright 2026 The PrivFusion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef PRIVFUSION_COMMON_CANONICAL_H_
#define PRIVFUSION_COMMON_CANONICAL_H_

// Canonical text documents shared by model files, graph snapshots, protocol
// messages, configs and manifests.
//
// A document is compact JSON with object keys in sorted order. Doubles are
// written as the shortest decimal that parses back to the identical 64-bit
// value, so decode(encode(x)) is bit-exact for every finite double. Matrices
// are {"rows": r, "cols": c, "data": [row-major values]}.

#include <string>
#include <string_view>
#include <vector>

#include "common/matrix.h"
#include "json.hpp"

namespace privfusion {

using Json = nlohmann::json;

Json MatrixToJson(const Matrix& m);
Matrix MatrixFromJson(const Json& j, std::string_view what);
Json VectorToJson(const Vector& v);
Vector VectorFromJson(const Json& j, std::string_view what);

std::string CanonicalDump(const Json& j);
// Throws Error(kMalformed) on syntax errors.
Json ParseDocument(std::string_view text, std::string_view what);

// Field access that reports missing/mistyped fields as kMalformed.
const Json& Field(const Json& j, std::string_view key, std::string_view what);

std::string Sha256Hex(std::string_view bytes);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace privfusion

#endif  // PRIVFUSION_COMMON_CANONICAL_H_
