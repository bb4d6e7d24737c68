// Copyright 2026 The SAS Authors.
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

#ifndef SAS_IO_H_
#define SAS_IO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sas/types.h"

namespace sas {

// SASE binary layout, little-endian:
//   "SASE" | version u32 = 1 | n u64 | m u32 | d u32 | dtype u8 (0 = f32) |
//   7 zero bytes | payload f32[n*m*d], example -> view -> dim.
inline constexpr std::uint32_t kSaseVersion = 1;
inline constexpr std::size_t kSaseHeaderBytes = 32;

std::vector<std::uint8_t> EncodeEmbeddings(const EmbeddingSet& embeddings);
// Throws IoError on bad magic, version, dtype, reserved bytes or payload
// size, and ValidationError on non-finite values.
EmbeddingSet DecodeEmbeddings(std::span<const std::uint8_t> bytes);

EmbeddingSet ReadEmbeddings(const std::filesystem::path& path);
void WriteEmbeddings(const EmbeddingSet& embeddings, const std::filesystem::path& path);

// One integer per line; the line count is the example count.
std::vector<std::int64_t> ReadLabels(const std::filesystem::path& path);
void WriteLabels(std::span<const std::int64_t> labels, const std::filesystem::path& path);
std::vector<std::int64_t> ParseLabels(const std::string& text);

// 64-bit FNV-1a.
std::uint64_t Fnv1a64(std::span<const std::uint8_t> bytes);
// FNV-1a of the little-endian f32 payload, as it appears in a SASE file.
std::uint64_t PayloadChecksum(const EmbeddingSet& embeddings);
// FNV-1a of the class ids as little-endian u64.
std::uint64_t AssignmentChecksum(std::span<const std::size_t> assignments);
std::string ChecksumHex(std::uint64_t checksum);

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

// Report document with keys in their fixed order.
Json ReportToJson(const SelectionResult& result);
// Inverse of ReportToJson. Throws ValidationError on schema violations.
SelectionResult ReportFromJson(const Json& doc);

// Two-space indented JSON with doubles printed at 17 significant digits and
// non-finite doubles as null. Arrays of scalars stay on one line.
std::string SerializeJson(const Json& doc);

void WriteReport(const SelectionResult& result, const std::filesystem::path& path);
SelectionResult ReadReport(const std::filesystem::path& path);

void WriteTextFile(const std::filesystem::path& path, const std::string& text);
std::string ReadTextFile(const std::filesystem::path& path);

}  // namespace sas

#endif  // SAS_IO_H_
