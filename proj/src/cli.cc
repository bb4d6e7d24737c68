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

#include "sas/cli.h"

#include <chrono>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "sas/io.h"
#include "sas/parallel.h"
#include "sas/partition.h"
#include "sas/selection.h"

namespace sas {

namespace {

std::shared_ptr<spdlog::logger> Logger() {
  static std::shared_ptr<spdlog::logger> logger = [] {
    auto l = std::make_shared<spdlog::logger>("sas", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    l->set_pattern("[%l] %v");
    const char* env = std::getenv("SAS_LOG");
    const std::string level = env ? env : "info";
    if (level == "error") {
      l->set_level(spdlog::level::err);
    } else if (level == "debug") {
      l->set_level(spdlog::level::debug);
    } else {
      l->set_level(spdlog::level::info);
    }
    return l;
  }();
  return logger;
}

struct SelectArgs {
  std::string embeddings;
  std::string labels;
  std::size_t kmeans = 0;
  std::size_t kmeans_iters = 100;
  double kmeans_tol = 1e-4;
  double budget_fraction = 0.0;
  std::size_t budget_total = 0;
  double tau = 0.0;
  bool refine = true;
  bool normalize = true;
  std::uint64_t seed = 0;
  std::size_t threads = DefaultThreadCount();
  std::string out;
  std::size_t baseline_count = 20;
  bool diagnostics = true;
  std::size_t max_matrix_bytes = std::size_t{8} << 30;
  std::string embedding_source = "unspecified";
};

struct DiagnoseArgs {
  std::string embeddings;
  std::string report;
  std::string labels;
  std::string out;
  std::size_t baseline_count = 20;
  std::size_t threads = DefaultThreadCount();
};

struct PartitionArgs {
  std::string embeddings;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::size_t iters = 100;
  double tol = 1e-4;
  bool normalize = true;
  std::size_t threads = DefaultThreadCount();
  std::string out;
};

EmbeddingSet LoadChecked(const std::string& path, bool normalize) {
  EmbeddingSet raw = ReadEmbeddings(path);
  const ValidationReport report = Validate(raw, normalize);
  if (!report.valid) {
    std::string msg;
    for (const auto& issue : report.issues) msg += (msg.empty() ? "" : "; ") + issue.message;
    throw ValidationError(msg);
  }
  Logger()->debug("loaded {} examples x {} views x {} dims, norms in [{}, {}]", report.n, report.m,
                  report.d, report.min_norm, report.max_norm);
  return raw;
}

int RunSelect(const SelectArgs& a, bool has_fraction, bool has_total, std::ostream& out) {
  const bool has_labels = !a.labels.empty();
  const bool has_kmeans = a.kmeans > 0;
  if (!has_labels && !has_kmeans) {
    throw ValidationError("partition source required (--labels FILE or --kmeans K)");
  }
  if (!has_fraction && !has_total) {
    throw ValidationError("budget required (--budget-fraction or --budget-total)");
  }
  SelectionConfig config;
  if (has_fraction) config.budget_fraction = a.budget_fraction;
  if (has_total) config.budget_total = a.budget_total;
  config.tau = a.tau;
  config.refine = a.refine;
  config.normalize = a.normalize;
  config.seed = a.seed;
  config.partition_source = has_kmeans ? PartitionSource::kKMeans : PartitionSource::kLabels;
  config.kmeans_k = a.kmeans;
  config.kmeans_iters = a.kmeans_iters;
  config.kmeans_tol = a.kmeans_tol;
  config.baseline_count = a.baseline_count;
  config.diagnostics = a.diagnostics;
  config.threads = std::max<std::size_t>(1, a.threads);
  config.max_matrix_bytes = a.max_matrix_bytes;
  config.embedding_source = a.embedding_source;

  const auto start = std::chrono::steady_clock::now();
  const EmbeddingSet raw = LoadChecked(a.embeddings, config.normalize);
  std::optional<std::vector<std::int64_t>> labels;
  if (has_labels) labels = ReadLabels(a.labels);
  const SelectionResult result = RunSelection(raw, labels, config);
  WriteReport(result, a.out);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Logger()->info("{} classes, budget {}, report written to {}", result.classes.size(),
                 result.total_budget, a.out);
  out << "selected " << result.total_selected << " / " << result.n << " examples in " << seconds
      << " s\n";
  return kExitOk;
}

int RunDiagnose(const DiagnoseArgs& a, std::ostream& out) {
  const SelectionResult report = ReadReport(a.report);
  const EmbeddingSet raw = LoadChecked(a.embeddings, report.config.normalize);
  const std::uint64_t checksum = PayloadChecksum(raw);
  if (checksum != report.input_checksum) {
    throw ValidationError("checksum mismatch: embeddings " + ChecksumHex(checksum) +
                          ", report " + ChecksumHex(report.input_checksum));
  }
  if (raw.n() != report.n) throw ValidationError("example count differs from the report");
  SelectionConfig config = report.config;
  config.threads = std::max<std::size_t>(1, a.threads);
  const EmbeddingSet prepared = PrepareEmbeddings(raw, config);
  std::optional<std::vector<std::int64_t>> labels;
  if (!a.labels.empty()) labels = ReadLabels(a.labels);
  const LatentPartition partition = BuildPartition(prepared, labels, config);
  SelectionResult diagnosed =
      Rediagnose(prepared, partition, report, a.baseline_count, config.threads);
  diagnosed.input_checksum = checksum;
  WriteReport(diagnosed, a.out);
  out << "diagnosed " << diagnosed.total_selected << " selected examples across "
      << diagnosed.classes.size() << " classes\n";
  return kExitOk;
}

int RunPartition(const PartitionArgs& a, std::ostream& out) {
  const EmbeddingSet raw = LoadChecked(a.embeddings, a.normalize);
  if (a.k < 1 || a.k > raw.n()) {
    throw ValidationError("K=" + std::to_string(a.k) + " out of range [1, " +
                          std::to_string(raw.n()) + "]");
  }
  SelectionConfig config;
  config.normalize = a.normalize;
  const EmbeddingSet prepared = PrepareEmbeddings(raw, config);
  KMeansOptions km{a.k, a.seed, a.iters, a.tol, std::max<std::size_t>(1, a.threads)};
  const LatentPartition partition = KMeansPartition(prepared, km);
  std::vector<std::int64_t> labels(partition.assignments().begin(),
                                   partition.assignments().end());
  WriteLabels(labels, a.out);
  out << "wrote " << partition.k() << " classes for " << partition.n() << " examples\n";
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subset selection for contrastive learning by expected augmentation similarity"};
  app.require_subcommand(1);

  SelectArgs sel;
  auto* select = app.add_subcommand("select", "select a subset and write a report");
  select->add_option("--embeddings", sel.embeddings, "SASE embeddings file")->required();
  auto* labels_opt = select->add_option("--labels", sel.labels, "label file, one integer per line");
  auto* kmeans_opt = select->add_option("--kmeans", sel.kmeans, "cluster into K latent classes");
  labels_opt->excludes(kmeans_opt);
  select->add_option("--kmeans-iters", sel.kmeans_iters, "Lloyd iteration cap");
  select->add_option("--kmeans-tol", sel.kmeans_tol, "centroid movement tolerance");
  auto* fraction_opt =
      select->add_option("--budget-fraction", sel.budget_fraction, "fraction of examples to keep");
  auto* total_opt = select->add_option("--budget-total", sel.budget_total, "number to keep");
  fraction_opt->excludes(total_opt);
  select->add_option("--tau", sel.tau, "similarity threshold");
  select->add_flag("--refine,!--no-refine", sel.refine, "double-greedy refinement");
  select->add_flag("--normalize,!--no-normalize", sel.normalize, "L2-normalize every view");
  select->add_option("--seed", sel.seed, "seed for clustering and baselines");
  select->add_option("--threads", sel.threads, "worker threads");
  select->add_option("--out", sel.out, "report path")->required();
  select->add_option("--baseline-count", sel.baseline_count, "random baseline subsets per class");
  select->add_flag("!--no-diagnostics", sel.diagnostics, "skip per-class diagnostics");
  select->add_option("--max-matrix-bytes", sel.max_matrix_bytes, "cap on one class's matrix");
  select->add_option("--embedding-source", sel.embedding_source,
                     "free-form note on what the embeddings are");

  DiagnoseArgs diag;
  auto* diagnose = app.add_subcommand("diagnose", "recompute diagnostics for a report");
  diagnose->add_option("--embeddings", diag.embeddings, "SASE embeddings file")->required();
  diagnose->add_option("--report", diag.report, "report from select")->required();
  diagnose->add_option("--labels", diag.labels, "label file (labels-partitioned reports)");
  diagnose->add_option("--out", diag.out, "diagnostics path")->required();
  diagnose->add_option("--baseline-count", diag.baseline_count, "random baseline subsets");
  diagnose->add_option("--threads", diag.threads, "worker threads");

  PartitionArgs part;
  auto* partition = app.add_subcommand("partition", "cluster embeddings into a label file");
  partition->add_option("--embeddings", part.embeddings, "SASE embeddings file")->required();
  partition->add_option("--k,--kmeans", part.k, "number of clusters")->required();
  partition->add_option("--seed", part.seed, "k-means++ seed");
  partition->add_option("--iters", part.iters, "Lloyd iteration cap");
  partition->add_option("--tol", part.tol, "centroid movement tolerance");
  partition->add_flag("--normalize,!--no-normalize", part.normalize, "L2-normalize every view");
  partition->add_option("--threads", part.threads, "worker threads");
  partition->add_option("--out", part.out, "label file path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (select->parsed()) {
      return RunSelect(sel, fraction_opt->count() > 0, total_opt->count() > 0, out);
    }
    if (diagnose->parsed()) return RunDiagnose(diag, out);
    return RunPartition(part, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace sas
