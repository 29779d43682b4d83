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

#include "common/canonical.h"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "common/error.h"

namespace privfusion {

Json MatrixToJson(const Matrix& m) {
  Json data = Json::array();
  data.get_ref<Json::array_t&>().reserve(static_cast<size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const double x = m.data()[i];
    Require(std::isfinite(x), ErrorCode::kInvalidArgument,
            "cannot serialize non-finite matrix entry");
    data.push_back(x);
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix MatrixFromJson(const Json& j, std::string_view what) {
  const auto& rows_j = Field(j, "rows", what);
  const auto& cols_j = Field(j, "cols", what);
  const auto& data = Field(j, "data", what);
  if (!rows_j.is_number_unsigned() || !cols_j.is_number_unsigned() ||
      !data.is_array()) {
    Fail(ErrorCode::kMalformed, std::string(what) + ": bad matrix header");
  }
  const auto rows = rows_j.get<uint64_t>();
  const auto cols = cols_j.get<uint64_t>();
  if (cols != 0 && rows > data.size() / cols + 1) {
    Fail(ErrorCode::kMalformed, std::string(what) + ": matrix size overflow");
  }
  if (data.size() != rows * cols) {
    Fail(ErrorCode::kMalformed, std::string(what) + ": expected " +
                                    std::to_string(rows * cols) +
                                    " entries, found " +
                                    std::to_string(data.size()));
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (size_t i = 0; i < data.size(); ++i) {
    if (!data[i].is_number()) {
      Fail(ErrorCode::kMalformed, std::string(what) + ": non-numeric entry");
    }
    m.data()[i] = data[i].get<double>();
  }
  return m;
}

Json VectorToJson(const Vector& v) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    Require(std::isfinite(v[i]), ErrorCode::kInvalidArgument,
            "cannot serialize non-finite vector entry");
    data.push_back(v[i]);
  }
  return data;
}

Vector VectorFromJson(const Json& j, std::string_view what) {
  if (!j.is_array()) {
    Fail(ErrorCode::kMalformed, std::string(what) + ": expected array");
  }
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      Fail(ErrorCode::kMalformed, std::string(what) + ": non-numeric entry");
    }
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

std::string CanonicalDump(const Json& j) { return j.dump(); }

Json ParseDocument(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kMalformed, std::string(what) + ": " + e.what());
  }
}

const Json& Field(const Json& j, std::string_view key, std::string_view what) {
  if (!j.is_object()) {
    Fail(ErrorCode::kMalformed, std::string(what) + ": expected object");
  }
  auto it = j.find(key);
  if (it == j.end()) {
    Fail(ErrorCode::kMalformed,
         std::string(what) + ": missing field '" + std::string(key) + "'");
  }
  return *it;
}

std::string Sha256Hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length,
                 EVP_sha256(), nullptr) != 1) {
    Fail(ErrorCode::kIo, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) Fail(ErrorCode::kIo, "short write to " + path);
}

}  // namespace privfusion
