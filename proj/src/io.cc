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

#include "sas/io.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace sas {

namespace {

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void PutU64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint64_t GetLE(std::span<const std::uint8_t> bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int b = 0; b < width; ++b) {
    v |= static_cast<std::uint64_t>(bytes[offset + static_cast<std::size_t>(b)]) << (8 * b);
  }
  return v;
}

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t FnvStep(std::uint64_t h, std::uint8_t byte) { return (h ^ byte) * kFnvPrime; }

}  // namespace

std::vector<std::uint8_t> EncodeEmbeddings(const EmbeddingSet& embeddings) {
  std::vector<std::uint8_t> out;
  out.reserve(kSaseHeaderBytes + 4 * embeddings.size());
  for (char c : {'S', 'A', 'S', 'E'}) out.push_back(static_cast<std::uint8_t>(c));
  PutU32(out, kSaseVersion);
  PutU64(out, embeddings.n());
  PutU32(out, static_cast<std::uint32_t>(embeddings.m()));
  PutU32(out, static_cast<std::uint32_t>(embeddings.d()));
  out.push_back(0);  // dtype f32
  out.insert(out.end(), 7, 0);
  const float* values = embeddings.data();
  for (std::size_t k = 0; k < embeddings.size(); ++k) {
    PutU32(out, std::bit_cast<std::uint32_t>(values[k]));
  }
  return out;
}

EmbeddingSet DecodeEmbeddings(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kSaseHeaderBytes) throw IoError("truncated header");
  if (std::memcmp(bytes.data(), "SASE", 4) != 0) throw IoError("bad magic (expected \"SASE\")");
  const auto version = static_cast<std::uint32_t>(GetLE(bytes, 4, 4));
  if (version != kSaseVersion) {
    throw IoError("version mismatch: file has " + std::to_string(version) + ", reader supports " +
                  std::to_string(kSaseVersion));
  }
  const std::uint64_t n = GetLE(bytes, 8, 8);
  const std::uint64_t m = GetLE(bytes, 16, 4);
  const std::uint64_t d = GetLE(bytes, 20, 4);
  if (bytes[24] != 0) throw IoError("unsupported dtype " + std::to_string(bytes[24]));
  for (std::size_t b = 25; b < kSaseHeaderBytes; ++b) {
    if (bytes[b] != 0) throw IoError("reserved header bytes must be zero");
  }
  if (n == 0 || m == 0 || d == 0) throw ValidationError("embedding extents must be positive");
  const long double expected = static_cast<long double>(n) * m * d * 4.0L;
  const std::size_t payload = bytes.size() - kSaseHeaderBytes;
  if (static_cast<long double>(payload) < expected) {
    throw IoError("truncated payload: " + std::to_string(payload) + " bytes, header implies " +
                  std::to_string(static_cast<unsigned long long>(expected)));
  }
  if (static_cast<long double>(payload) > expected) {
    throw IoError("payload has " + std::to_string(payload) +
                  " bytes, more than the header implies");
  }
  const std::size_t count = static_cast<std::size_t>(n * m * d);
  std::vector<float> values(count);
  for (std::size_t k = 0; k < count; ++k) {
    values[k] = std::bit_cast<float>(
        static_cast<std::uint32_t>(GetLE(bytes, kSaseHeaderBytes + 4 * k, 4)));
  }
  return EmbeddingSet(static_cast<std::size_t>(n), static_cast<std::size_t>(m),
                      static_cast<std::size_t>(d), std::move(values));
}

EmbeddingSet ReadEmbeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embeddings file '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return DecodeEmbeddings(bytes);
}

void WriteEmbeddings(const EmbeddingSet& embeddings, const std::filesystem::path& path) {
  const auto bytes = EncodeEmbeddings(embeddings);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<std::int64_t> ParseLabels(const std::string& text) {
  std::vector<std::int64_t> labels;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    ++line_no;
    std::string_view line(text.data() + pos, end - pos);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.remove_suffix(1);
    }
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
    if (line.empty() || ec != std::errc() || ptr != line.data() + line.size()) {
      throw ValidationError("label file line " + std::to_string(line_no) +
                            " is not an integer: '" + std::string(line) + "'");
    }
    labels.push_back(value);
    pos = end + 1;
  }
  return labels;
}

std::vector<std::int64_t> ReadLabels(const std::filesystem::path& path) {
  return ParseLabels(ReadTextFile(path));
}

void WriteLabels(std::span<const std::int64_t> labels, const std::filesystem::path& path) {
  std::string text;
  for (std::int64_t v : labels) {
    text += std::to_string(v);
    text += '\n';
  }
  WriteTextFile(path, text);
}

std::uint64_t Fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = kFnvOffset;
  for (std::uint8_t b : bytes) h = FnvStep(h, b);
  return h;
}

std::uint64_t PayloadChecksum(const EmbeddingSet& embeddings) {
  std::uint64_t h = kFnvOffset;
  const float* values = embeddings.data();
  for (std::size_t k = 0; k < embeddings.size(); ++k) {
    const auto bits = std::bit_cast<std::uint32_t>(values[k]);
    for (int b = 0; b < 4; ++b) h = FnvStep(h, static_cast<std::uint8_t>(bits >> (8 * b)));
  }
  return h;
}

std::uint64_t AssignmentChecksum(std::span<const std::size_t> assignments) {
  std::uint64_t h = kFnvOffset;
  for (std::size_t a : assignments) {
    const auto v = static_cast<std::uint64_t>(a);
    for (int b = 0; b < 8; ++b) h = FnvStep(h, static_cast<std::uint8_t>(v >> (8 * b)));
  }
  return h;
}

std::string ChecksumHex(std::uint64_t checksum) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(checksum));
  return buf;
}

namespace {

std::uint64_t ParseHex(const std::string& hex) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), v, 16);
  if (ec != std::errc() || ptr != hex.data() + hex.size() || hex.size() != 16) {
    throw ValidationError("malformed checksum '" + hex + "'");
  }
  return v;
}

Json Number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Json Optional(const std::optional<double>& v) { return v ? Number(*v) : Json(nullptr); }

double AsDouble(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

std::optional<double> AsOptional(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

Json MatrixToJson(const Eigen::MatrixXd& mat) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < mat.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < mat.cols(); ++c) row.push_back(Number(mat(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd MatrixFromJson(const Json& rows) {
  const auto k = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd mat(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    const Json& row = rows.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != k) {
      throw ValidationError("divergence matrix must be square");
    }
    for (Eigen::Index c = 0; c < k; ++c) mat(r, c) = AsDouble(row.at(static_cast<std::size_t>(c)));
  }
  return mat;
}

}  // namespace

Json ReportToJson(const SelectionResult& result) {
  const SelectionConfig& cfg = result.config;
  Json config;
  config["embedding_source"] = cfg.embedding_source;
  config["examples"] = result.n;
  config["budget_fraction"] = cfg.budget_fraction ? Json(*cfg.budget_fraction) : Json(nullptr);
  config["budget_total"] = cfg.budget_total ? Json(*cfg.budget_total) : Json(nullptr);
  config["total_budget"] = result.total_budget;
  config["tau"] = cfg.tau;
  config["refine"] = cfg.refine;
  config["normalize"] = cfg.normalize;
  config["seed"] = cfg.seed;
  Json partition;
  partition["source"] = cfg.partition_source == PartitionSource::kKMeans ? "kmeans" : "labels";
  partition["classes"] = result.classes.size();
  partition["kmeans_k"] = cfg.kmeans_k;
  partition["kmeans_iters"] = cfg.kmeans_iters;
  partition["kmeans_tol"] = cfg.kmeans_tol;
  partition["assignment_checksum"] = ChecksumHex(result.partition_checksum);
  config["partition"] = std::move(partition);
  config["baseline_count"] = cfg.baseline_count;
  config["diagnostics"] = cfg.diagnostics;
  config["max_matrix_bytes"] = cfg.max_matrix_bytes;
  config["refine_objective_scope"] = "full_class";
  config["omitted_constants"] = Json::array({"L", "eta(epsilon)", "1/n_k prefactors"});

  Json classes = Json::array();
  for (const ClassResult& c : result.classes) {
    Json cls;
    cls["class_id"] = c.class_id;
    cls["size"] = c.size;
    cls["r_k"] = c.budget;
    cls["final_size"] = c.final_size;
    cls["selected"] = c.selected;
    cls["objective_greedy"] = Number(c.objective_greedy);
    cls["objective_refined"] = Number(c.objective_refined);
    if (c.diagnostics) {
      Json d;
      d["center_error"] = Number(c.diagnostics->center_error);
      d["alignment_error"] = Number(c.diagnostics->alignment_error);
      d["alignment_loss_subset"] = Optional(c.diagnostics->alignment_loss_subset);
      d["alignment_loss_full"] = Optional(c.diagnostics->alignment_loss_full);
      cls["diagnostics"] = std::move(d);
    } else {
      cls["diagnostics"] = nullptr;
    }
    if (c.random_baseline) {
      const RandomBaseline& b = *c.random_baseline;
      Json base;
      base["count"] = b.count;
      base["subset_size"] = b.subset_size;
      base["center_error_mean"] = Number(b.center_error_mean);
      base["alignment_error_mean"] = Number(b.alignment_error_mean);
      base["alignment_loss_mean"] = Optional(b.alignment_loss_mean);
      cls["random_baseline"] = std::move(base);
    }
    classes.push_back(std::move(cls));
  }

  Json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["config"] = std::move(config);
  doc["input_checksum"] = ChecksumHex(result.input_checksum);
  doc["classes"] = std::move(classes);
  Json divergence;
  divergence["full"] = MatrixToJson(result.divergence_full);
  divergence["subset"] = MatrixToJson(result.divergence_subset);
  doc["divergence"] = std::move(divergence);
  doc["total_selected"] = result.total_selected;
  return doc;
}

SelectionResult ReportFromJson(const Json& doc) {
  try {
    if (doc.at("schema_version").get<int>() != kReportSchemaVersion) {
      throw ValidationError("unsupported report schema_version");
    }
    SelectionResult r;
    const Json& config = doc.at("config");
    SelectionConfig& cfg = r.config;
    cfg.embedding_source = config.at("embedding_source").get<std::string>();
    r.n = config.at("examples").get<std::size_t>();
    if (!config.at("budget_fraction").is_null()) {
      cfg.budget_fraction = config.at("budget_fraction").get<double>();
    }
    if (!config.at("budget_total").is_null()) {
      cfg.budget_total = config.at("budget_total").get<std::size_t>();
    }
    r.total_budget = config.at("total_budget").get<std::size_t>();
    cfg.tau = config.at("tau").get<double>();
    cfg.refine = config.at("refine").get<bool>();
    cfg.normalize = config.at("normalize").get<bool>();
    cfg.seed = config.at("seed").get<std::uint64_t>();
    const Json& partition = config.at("partition");
    const auto source = partition.at("source").get<std::string>();
    if (source != "kmeans" && source != "labels") {
      throw ValidationError("unknown partition source '" + source + "'");
    }
    cfg.partition_source = source == "kmeans" ? PartitionSource::kKMeans : PartitionSource::kLabels;
    cfg.kmeans_k = partition.at("kmeans_k").get<std::size_t>();
    cfg.kmeans_iters = partition.at("kmeans_iters").get<std::size_t>();
    cfg.kmeans_tol = partition.at("kmeans_tol").get<double>();
    r.partition_checksum = ParseHex(partition.at("assignment_checksum").get<std::string>());
    cfg.baseline_count = config.at("baseline_count").get<std::size_t>();
    cfg.diagnostics = config.at("diagnostics").get<bool>();
    cfg.max_matrix_bytes = config.at("max_matrix_bytes").get<std::size_t>();

    r.input_checksum = ParseHex(doc.at("input_checksum").get<std::string>());
    for (const Json& cls : doc.at("classes")) {
      ClassResult c;
      c.class_id = cls.at("class_id").get<std::size_t>();
      c.size = cls.at("size").get<std::size_t>();
      c.budget = cls.at("r_k").get<std::size_t>();
      c.final_size = cls.at("final_size").get<std::size_t>();
      c.selected = cls.at("selected").get<std::vector<std::size_t>>();
      for (std::size_t t = 1; t < c.selected.size(); ++t) {
        if (c.selected[t - 1] >= c.selected[t]) {
          throw ValidationError("selected indices of class " + std::to_string(c.class_id) +
                                " are not strictly increasing");
        }
      }
      if (c.selected.size() != c.final_size) {
        throw ValidationError("final_size disagrees with the selected list");
      }
      c.objective_greedy = AsDouble(cls.at("objective_greedy"));
      c.objective_refined = AsDouble(cls.at("objective_refined"));
      const Json& d = cls.at("diagnostics");
      if (!d.is_null()) {
        ClassDiagnostics diag;
        diag.center_error = AsDouble(d.at("center_error"));
        diag.alignment_error = AsDouble(d.at("alignment_error"));
        diag.alignment_loss_subset = AsOptional(d.at("alignment_loss_subset"));
        diag.alignment_loss_full = AsOptional(d.at("alignment_loss_full"));
        c.diagnostics = diag;
      }
      if (cls.contains("random_baseline")) {
        const Json& b = cls.at("random_baseline");
        RandomBaseline base;
        base.count = b.at("count").get<std::size_t>();
        base.subset_size = b.at("subset_size").get<std::size_t>();
        base.center_error_mean = AsDouble(b.at("center_error_mean"));
        base.alignment_error_mean = AsDouble(b.at("alignment_error_mean"));
        base.alignment_loss_mean = AsOptional(b.at("alignment_loss_mean"));
        c.random_baseline = base;
      }
      r.classes.push_back(std::move(c));
    }
    r.divergence_full = MatrixFromJson(doc.at("divergence").at("full"));
    r.divergence_subset = MatrixFromJson(doc.at("divergence").at("subset"));
    r.total_selected = doc.at("total_selected").get<std::size_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed report: ") + e.what());
  }
}

namespace {

std::string FormatDouble(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  std::string s(buf, ptr);
  // Keep a float marker so the value re-parses as a float.
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

bool IsScalar(const Json& j) { return !j.is_array() && !j.is_object(); }

void Emit(const Json& j, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out += ",\n";
      first = false;
      out += pad;
      out += Json(it.key()).dump();
      out += ": ";
      Emit(it.value(), depth + 1, out);
    }
    out += "\n" + close_pad + "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
      return;
    }
    const bool inline_array = std::all_of(j.begin(), j.end(), IsScalar);
    if (inline_array) {
      out += "[";
      for (std::size_t t = 0; t < j.size(); ++t) {
        if (t) out += ", ";
        Emit(j[t], depth, out);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t t = 0; t < j.size(); ++t) {
      if (t) out += ",\n";
      out += pad;
      Emit(j[t], depth + 1, out);
    }
    out += "\n" + close_pad + "]";
  } else if (j.is_number_float()) {
    out += FormatDouble(j.get<double>());
  } else {
    out += j.dump();
  }
}

}  // namespace

std::string SerializeJson(const Json& doc) {
  std::string out;
  Emit(doc, 0, out);
  out += "\n";
  return out;
}

void WriteReport(const SelectionResult& result, const std::filesystem::path& path) {
  WriteTextFile(path, SerializeJson(ReportToJson(result)));
}

SelectionResult ReadReport(const std::filesystem::path& path) {
  const std::string text = ReadTextFile(path);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("report '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return ReportFromJson(doc);
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  if (path.empty()) throw IoError("output path is empty");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace sas
