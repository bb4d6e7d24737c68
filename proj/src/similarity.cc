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

#include "sas/similarity.h"

#include <cmath>
#include <string>

#include "sas/parallel.h"

namespace sas {

namespace {

// Gathers every view of every member into a contiguous double block,
// member-major, so row r*m + v is view v of member r.
RowMatrixXd GatherViews(const EmbeddingSet& embeddings, std::span<const std::size_t> members) {
  const auto m = static_cast<Eigen::Index>(embeddings.m());
  RowMatrixXd out(static_cast<Eigen::Index>(members.size()) * m,
                  static_cast<Eigen::Index>(embeddings.d()));
  for (std::size_t r = 0; r < members.size(); ++r) {
    if (members[r] >= embeddings.n()) {
      throw ValidationError("class member " + std::to_string(members[r]) +
                            " is out of range for " + std::to_string(embeddings.n()) +
                            " examples");
    }
    out.middleRows(static_cast<Eigen::Index>(r) * m, m) =
        embeddings.example(members[r]).cast<double>();
  }
  return out;
}

void MirrorUpper(Eigen::MatrixXd& mat) {
  const Eigen::Index n = mat.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) mat(j, i) = mat(i, j);
  }
}

}  // namespace

void CheckMatrixBudget(std::size_t n, std::size_t max_matrix_bytes) {
  const long double bytes = static_cast<long double>(n) * n * sizeof(double);
  if (bytes > static_cast<long double>(max_matrix_bytes)) {
    throw ValidationError("class of " + std::to_string(n) + " examples needs a " +
                          std::to_string(static_cast<unsigned long long>(bytes)) +
                          "-byte similarity matrix, above the cap of " +
                          std::to_string(max_matrix_bytes) + " bytes");
  }
}

Eigen::MatrixXd ExpectedAugmentationDistance(const EmbeddingSet& embeddings,
                                             std::span<const std::size_t> members,
                                             const SimilarityOptions& options) {
  if (members.empty()) throw ValidationError("class must be nonempty");
  CheckMatrixBudget(members.size(), options.max_matrix_bytes);
  const RowMatrixXd views = GatherViews(embeddings, members);
  const auto m = static_cast<Eigen::Index>(embeddings.m());
  const auto n = static_cast<Eigen::Index>(members.size());
  const double pairs = static_cast<double>(m * m);

  Eigen::MatrixXd dist(n, n);
  ParallelFor(members.size(), options.threads, [&](std::size_t row) {
    const auto i = static_cast<Eigen::Index>(row);
    for (Eigen::Index j = i; j < n; ++j) {
      double sum = 0.0;
      for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b < m; ++b) {
          sum += (views.row(i * m + a) - views.row(j * m + b)).norm();
        }
      }
      dist(i, j) = sum / pairs;
    }
  });
  MirrorUpper(dist);
  return dist;
}

Eigen::MatrixXd RawAugmentationSimilarity(const EmbeddingSet& embeddings,
                                          std::span<const std::size_t> members,
                                          const SimilarityOptions& options) {
  if (members.empty()) throw ValidationError("class must be nonempty");
  CheckMatrixBudget(members.size(), options.max_matrix_bytes);
  const auto n = static_cast<Eigen::Index>(members.size());
  RowMatrixXd means(n, static_cast<Eigen::Index>(embeddings.d()));
  for (Eigen::Index r = 0; r < n; ++r) {
    if (members[static_cast<std::size_t>(r)] >= embeddings.n()) {
      throw ValidationError("class member out of range");
    }
    means.row(r) = embeddings.ViewMean(members[static_cast<std::size_t>(r)]);
  }

  Eigen::MatrixXd raw(n, n);
  ParallelFor(members.size(), options.threads, [&](std::size_t row) {
    const auto i = static_cast<Eigen::Index>(row);
    for (Eigen::Index j = i; j < n; ++j) raw(i, j) = means.row(i).dot(means.row(j));
  });
  MirrorUpper(raw);
  return raw;
}

SimilarityMatrix ExpectedAugmentationSimilarity(const EmbeddingSet& embeddings,
                                                std::span<const std::size_t> members, double tau,
                                                const SimilarityOptions& options) {
  SimilarityMatrix out;
  out.local_to_global.assign(members.begin(), members.end());
  out.tau = tau;
  out.s = ApplyThreshold(RawAugmentationSimilarity(embeddings, members, options), tau);
  return out;
}

}  // namespace sas
