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

#include "sas/selection.h"

#include <algorithm>
#include <span>
#include <string>

#include "sas/diagnostics.h"
#include "sas/io.h"
#include "sas/parallel.h"
#include "sas/partition.h"
#include "sas/random.h"
#include "sas/similarity.h"
#include "sas/submodular.h"

namespace sas {

namespace {

// Class-level work runs in parallel across classes when there are enough of
// them; otherwise the threads go to the row blocks inside each class.
struct ThreadSplit {
  std::size_t outer;
  std::size_t inner;
};

ThreadSplit SplitThreads(std::size_t classes, std::size_t threads) {
  threads = std::max<std::size_t>(threads, 1);
  if (classes >= threads) return {threads, 1};
  return {1, threads};
}

std::uint64_t BaselineSeed(std::uint64_t seed, std::size_t class_id) {
  return MixSeed(seed ^ 0x5A5B5C5D00000000ULL, class_id);
}

void AttachDiagnostics(const EmbeddingSet& embeddings, std::span<const std::size_t> members,
                       std::span<const std::size_t> local_subset, std::size_t baseline_count,
                       std::uint64_t seed, const SimilarityOptions& sim_options,
                       ClassResult& out) {
  if (local_subset.empty()) return;
  const Eigen::MatrixXd dist = ExpectedAugmentationDistance(embeddings, members, sim_options);
  out.diagnostics = ComputeClassDiagnostics(embeddings, members, local_subset, dist);
  if (baseline_count > 0) {
    out.random_baseline = ComputeRandomBaseline(embeddings, members, local_subset.size(), dist,
                                                baseline_count, BaselineSeed(seed, out.class_id));
  }
}

template <typename Work>
void ForEachClass(std::size_t classes, std::size_t threads, Work&& work) {
  ParallelFor(classes, threads, [&](std::size_t k) {
    try {
      work(k);
    } catch (const ValidationError& e) {
      throw ValidationError("class " + std::to_string(k) + ": " + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error("class " + std::to_string(k) + ": " + e.what());
    }
  });
}

std::vector<std::vector<std::size_t>> SelectedGroups(const SelectionResult& r) {
  std::vector<std::vector<std::size_t>> groups;
  groups.reserve(r.classes.size());
  for (const auto& c : r.classes) groups.push_back(c.selected);
  return groups;
}

}  // namespace

EmbeddingSet PrepareEmbeddings(const EmbeddingSet& raw, const SelectionConfig& config) {
  if (config.normalize && !raw.normalized()) return raw.Normalized();
  return raw;
}

LatentPartition BuildPartition(const EmbeddingSet& prepared,
                               const std::optional<std::vector<std::int64_t>>& labels,
                               const SelectionConfig& config) {
  if (config.partition_source == PartitionSource::kLabels) {
    if (!labels) throw ValidationError("partition source required: labels were not supplied");
    return PartitionFromLabels(*labels, prepared.n());
  }
  KMeansOptions km;
  km.k = config.kmeans_k;
  km.seed = config.seed;
  km.max_iters = config.kmeans_iters;
  km.tol = config.kmeans_tol;
  km.threads = config.threads;
  return KMeansPartition(prepared, km);
}

SelectionResult SelectAll(const EmbeddingSet& embeddings, const LatentPartition& partition,
                          const SelectionConfig& config) {
  config.Check(embeddings.n());
  if (partition.n() != embeddings.n()) {
    throw ValidationError("partition covers " + std::to_string(partition.n()) +
                          " examples, embeddings have " + std::to_string(embeddings.n()));
  }
  SelectionResult result;
  result.config = config;
  result.n = embeddings.n();
  result.input_checksum = PayloadChecksum(embeddings);
  result.partition_checksum = AssignmentChecksum(partition.assignments());
  result.total_budget = config.TotalBudget(embeddings.n());

  const std::size_t k = partition.k();
  const std::vector<std::size_t> sizes = partition.sizes();
  const std::vector<std::size_t> budgets = AllocateBudgets(sizes, result.total_budget);
  const ThreadSplit split = SplitThreads(k, config.threads);
  SimilarityOptions sim_options{split.inner, config.max_matrix_bytes};

  result.classes.resize(k);
  ForEachClass(k, split.outer, [&](std::size_t c) {
    ClassResult& out = result.classes[c];
    const auto& members = partition.members(c);
    out.class_id = c;
    out.size = members.size();
    out.budget = budgets[c];
    if (out.budget == 0) return;

    const SimilarityMatrix sim =
        ExpectedAugmentationSimilarity(embeddings, members, config.tau, sim_options);
    const GreedyOutput greedy = GreedySelect(sim.s, out.budget);
    std::vector<std::size_t> local = greedy.order;
    std::sort(local.begin(), local.end());
    out.objective_greedy = Objective(std::span<const std::size_t>(local), sim.s);
    out.objective_refined = out.objective_greedy;
    if (config.refine) {
      RefineOutput refined = DoubleGreedyRefine(local, sim.s);
      local = std::move(refined.selected);
      out.objective_refined = refined.objective;
    }
    out.selected.reserve(local.size());
    for (std::size_t j : local) out.selected.push_back(sim.local_to_global[j]);
    out.final_size = out.selected.size();
    if (config.diagnostics) {
      AttachDiagnostics(embeddings, members, local, config.baseline_count, config.seed,
                        sim_options, out);
    }
  });

  for (const auto& c : result.classes) result.total_selected += c.final_size;
  result.divergence_full = CenterDivergence(embeddings, partition.class_members());
  result.divergence_subset = CenterDivergence(embeddings, SelectedGroups(result));
  return result;
}

SelectionResult RunSelection(const EmbeddingSet& raw,
                             const std::optional<std::vector<std::int64_t>>& labels,
                             const SelectionConfig& config) {
  config.Check(raw.n());
  const EmbeddingSet prepared = PrepareEmbeddings(raw, config);
  const LatentPartition partition = BuildPartition(prepared, labels, config);
  SelectionResult result = SelectAll(prepared, partition, config);
  result.input_checksum = PayloadChecksum(raw);
  return result;
}

SelectionResult Rediagnose(const EmbeddingSet& prepared, const LatentPartition& partition,
                           const SelectionResult& report, std::size_t baseline_count,
                           std::size_t threads) {
  if (partition.n() != prepared.n() || partition.k() != report.classes.size()) {
    throw ValidationError("partition does not match the report's classes");
  }
  if (AssignmentChecksum(partition.assignments()) != report.partition_checksum) {
    throw ValidationError("partition assignment checksum does not match the report");
  }
  SelectionResult out = report;
  out.config.baseline_count = baseline_count;
  out.config.diagnostics = true;
  const ThreadSplit split = SplitThreads(partition.k(), threads);
  SimilarityOptions sim_options{split.inner, report.config.max_matrix_bytes};

  ForEachClass(partition.k(), split.outer, [&](std::size_t c) {
    ClassResult& cls = out.classes[c];
    const auto& members = partition.members(c);
    cls.diagnostics.reset();
    cls.random_baseline.reset();
    std::vector<std::size_t> local;
    local.reserve(cls.selected.size());
    for (std::size_t g : cls.selected) {
      const auto it = std::lower_bound(members.begin(), members.end(), g);
      if (it == members.end() || *it != g) {
        throw ValidationError("selected example " + std::to_string(g) +
                              " is not a member of its class");
      }
      local.push_back(static_cast<std::size_t>(it - members.begin()));
    }
    if (local.empty()) return;
    const SimilarityMatrix sim =
        ExpectedAugmentationSimilarity(prepared, members, report.config.tau, sim_options);
    cls.objective_refined = Objective(std::span<const std::size_t>(local), sim.s);
    AttachDiagnostics(prepared, members, local, baseline_count, report.config.seed, sim_options,
                      cls);
  });
  out.divergence_full = CenterDivergence(prepared, partition.class_members());
  out.divergence_subset = CenterDivergence(prepared, SelectedGroups(out));
  return out;
}

}  // namespace sas
