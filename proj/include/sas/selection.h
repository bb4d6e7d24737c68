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

#ifndef SAS_SELECTION_H_
#define SAS_SELECTION_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "sas/types.h"

namespace sas {

// Applies the configured normalization. Throws ValidationError on zero
// views when normalizing.
EmbeddingSet PrepareEmbeddings(const EmbeddingSet& raw, const SelectionConfig& config);

// Latent classes from labels (labels source) or k-means (kmeans source).
LatentPartition BuildPartition(const EmbeddingSet& prepared,
                               const std::optional<std::vector<std::int64_t>>& labels,
                               const SelectionConfig& config);

// Per class: similarity matrix, lazy greedy to r_k, optional double-greedy
// refinement, diagnostics and random baselines. `embeddings` must already be
// prepared; input_checksum is taken from them unless overridden by the
// caller. Any class failure aborts the whole run with the class id attached.
SelectionResult SelectAll(const EmbeddingSet& embeddings, const LatentPartition& partition,
                          const SelectionConfig& config);

// PrepareEmbeddings + BuildPartition + SelectAll, with the checksum of the
// raw payload.
SelectionResult RunSelection(const EmbeddingSet& raw,
                             const std::optional<std::vector<std::int64_t>>& labels,
                             const SelectionConfig& config);

// Recomputes objectives, diagnostics and `baseline_count` random baselines
// for the subsets recorded in `report`. Throws ValidationError when the
// partition does not match the report.
SelectionResult Rediagnose(const EmbeddingSet& prepared, const LatentPartition& partition,
                           const SelectionResult& report, std::size_t baseline_count,
                           std::size_t threads);

}  // namespace sas

#endif  // SAS_SELECTION_H_
