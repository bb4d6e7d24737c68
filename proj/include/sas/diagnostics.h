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

#ifndef SAS_DIAGNOSTICS_H_
#define SAS_DIAGNOSTICS_H_

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sas/types.h"

namespace sas {

// Theory-side quantities for a chosen subset. All are unnormalized sums or
// means over the supplied embeddings; Lipschitz and eta(eps) constants and
// the 1/n_k prefactors are left out since they cannot be observed.
//
// `dist` is a class's n_k x n_k expected augmentation distance matrix and
// `subset` holds local indices into it.

// Mean of d_ij over the full class x subset grid (diagonal cells included).
template <typename Derived>
double CenterError(std::span<const std::size_t> subset, const Eigen::MatrixBase<Derived>& dist) {
  if (subset.empty()) throw ValidationError("center error needs a nonempty subset");
  double total = 0.0;
  for (Eigen::Index i = 0; i < dist.rows(); ++i) {
    for (std::size_t j : subset) total += dist(i, static_cast<Eigen::Index>(j));
  }
  return total / (static_cast<double>(dist.rows()) * static_cast<double>(subset.size()));
}

// sum over excluded i of min over selected j of d_ij.
template <typename Derived>
double AlignmentError(std::span<const std::size_t> subset, const Eigen::MatrixBase<Derived>& dist) {
  if (subset.empty()) throw ValidationError("alignment error needs a nonempty subset");
  std::vector<char> in_set(static_cast<std::size_t>(dist.rows()), 0);
  for (std::size_t j : subset) in_set.at(j) = 1;
  double total = 0.0;
  for (Eigen::Index i = 0; i < dist.rows(); ++i) {
    if (in_set[static_cast<std::size_t>(i)]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j : subset) best = std::min(best, double(dist(i, static_cast<Eigen::Index>(j))));
    total += best;
  }
  return total;
}

// Mean over `examples` (global indices) of the mean squared distance over
// ordered pairs of distinct views. Requires m >= 2.
double AlignmentLoss(const EmbeddingSet& embeddings, std::span<const std::size_t> examples);

// Row k is the mean over groups[k] and all their views. Empty groups give a
// NaN row.
RowMatrixXd GroupCenters(const EmbeddingSet& embeddings,
                         const std::vector<std::vector<std::size_t>>& groups);

// mu_k . mu_l for every pair of class centers.
Eigen::MatrixXd ClassCenterDivergence(const EmbeddingSet& embeddings,
                                      const LatentPartition& partition);
Eigen::MatrixXd CenterDivergence(const EmbeddingSet& embeddings,
                                 const std::vector<std::vector<std::size_t>>& groups);

// All per-class diagnostics for one subset. `members` are the class's global
// indices in local order; `subset` is local.
ClassDiagnostics ComputeClassDiagnostics(const EmbeddingSet& embeddings,
                                         std::span<const std::size_t> members,
                                         std::span<const std::size_t> subset,
                                         const Eigen::MatrixXd& dist);

// Averages the diagnostics of `count` seeded uniform subsets the size of
// `subset_size`, drawn from the class.
RandomBaseline ComputeRandomBaseline(const EmbeddingSet& embeddings,
                                     std::span<const std::size_t> members,
                                     std::size_t subset_size, const Eigen::MatrixXd& dist,
                                     std::size_t count, std::uint64_t seed);

}  // namespace sas

#endif  // SAS_DIAGNOSTICS_H_
