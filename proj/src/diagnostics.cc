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

#include "sas/diagnostics.h"

#include <random>

#include "sas/random.h"

namespace sas {

double AlignmentLoss(const EmbeddingSet& embeddings, std::span<const std::size_t> examples) {
  const std::size_t m = embeddings.m();
  if (m < 2) throw ValidationError("alignment loss is undefined for a single view (m = 1)");
  if (examples.empty()) throw ValidationError("alignment loss needs a nonempty index set");
  const double pairs = static_cast<double>(m * (m - 1));
  double total = 0.0;
  for (std::size_t i : examples) {
    if (i >= embeddings.n()) throw ValidationError("example index out of range");
    double sum = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        if (a == b) continue;
        sum += (embeddings.view(i, a).cast<double>() - embeddings.view(i, b).cast<double>())
                   .squaredNorm();
      }
    }
    total += sum / pairs;
  }
  return total / static_cast<double>(examples.size());
}

RowMatrixXd GroupCenters(const EmbeddingSet& embeddings,
                         const std::vector<std::vector<std::size_t>>& groups) {
  RowMatrixXd centers(static_cast<Eigen::Index>(groups.size()),
                      static_cast<Eigen::Index>(embeddings.d()));
  for (std::size_t k = 0; k < groups.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(k);
    if (groups[k].empty()) {
      centers.row(row).setConstant(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(centers.cols());
    for (std::size_t i : groups[k]) {
      for (std::size_t v = 0; v < embeddings.m(); ++v) sum += embeddings.view(i, v).cast<double>();
    }
    centers.row(row) = sum / static_cast<double>(groups[k].size() * embeddings.m());
  }
  return centers;
}

Eigen::MatrixXd CenterDivergence(const EmbeddingSet& embeddings,
                                 const std::vector<std::vector<std::size_t>>& groups) {
  const RowMatrixXd centers = GroupCenters(embeddings, groups);
  const Eigen::Index k = centers.rows();
  Eigen::MatrixXd out(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a; b < k; ++b) {
      out(a, b) = out(b, a) = centers.row(a).dot(centers.row(b));
    }
  }
  return out;
}

Eigen::MatrixXd ClassCenterDivergence(const EmbeddingSet& embeddings,
                                      const LatentPartition& partition) {
  if (partition.k() < 1) throw ValidationError("divergence needs at least one class");
  return CenterDivergence(embeddings, partition.class_members());
}

ClassDiagnostics ComputeClassDiagnostics(const EmbeddingSet& embeddings,
                                         std::span<const std::size_t> members,
                                         std::span<const std::size_t> subset,
                                         const Eigen::MatrixXd& dist) {
  ClassDiagnostics out;
  out.center_error = CenterError(subset, dist);
  out.alignment_error = AlignmentError(subset, dist);
  if (embeddings.m() >= 2) {
    std::vector<std::size_t> global;
    global.reserve(subset.size());
    for (std::size_t j : subset) global.push_back(members[j]);
    out.alignment_loss_subset = AlignmentLoss(embeddings, global);
    out.alignment_loss_full = AlignmentLoss(embeddings, members);
  }
  return out;
}

RandomBaseline ComputeRandomBaseline(const EmbeddingSet& embeddings,
                                     std::span<const std::size_t> members,
                                     std::size_t subset_size, const Eigen::MatrixXd& dist,
                                     std::size_t count, std::uint64_t seed) {
  RandomBaseline out;
  out.count = count;
  out.subset_size = subset_size;
  if (count == 0 || subset_size == 0) return out;
  std::mt19937_64 rng(seed);
  double loss = 0.0;
  for (std::size_t r = 0; r < count; ++r) {
    const auto subset = SampleWithoutReplacement(rng, members.size(), subset_size);
    const ClassDiagnostics d = ComputeClassDiagnostics(embeddings, members, subset, dist);
    out.center_error_mean += d.center_error;
    out.alignment_error_mean += d.alignment_error;
    if (d.alignment_loss_subset) loss += *d.alignment_loss_subset;
  }
  out.center_error_mean /= static_cast<double>(count);
  out.alignment_error_mean /= static_cast<double>(count);
  if (embeddings.m() >= 2) out.alignment_loss_mean = loss / static_cast<double>(count);
  return out;
}

}  // namespace sas
