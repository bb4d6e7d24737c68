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

#ifndef SAS_PARTITION_H_
#define SAS_PARTITION_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sas/types.h"

namespace sas {

// Distinct label values become classes 0..K-1 in ascending label order.
// origin() of the result holds the label value of each class.
LatentPartition PartitionFromLabels(std::span<const std::int64_t> labels);
// Same, also checking the label count against the number of examples.
LatentPartition PartitionFromLabels(std::span<const std::int64_t> labels, std::size_t n);

struct KMeansOptions {
  std::size_t k = 1;
  std::uint64_t seed = 0;
  std::size_t max_iters = 100;
  double tol = 1e-4;
  std::size_t threads = 1;
};

struct KMeansResult {
  std::vector<std::size_t> assignments;
  RowMatrixXd centroids;
  // Sum of squared distances to the assigned centroid after each Lloyd round.
  std::vector<double> objective_history;
  std::size_t iterations = 0;
  bool converged = false;
};

// k-means++ seeding then Lloyd rounds on the given points (one per row).
// Deterministic for fixed (points, options).
KMeansResult KMeans(const RowMatrixXd& points, const KMeansOptions& options);

// Clusters the view-mean of every example and returns the non-empty clusters.
LatentPartition KMeansPartition(const EmbeddingSet& embeddings, const KMeansOptions& options);

// View-mean of every example, one row each.
RowMatrixXd ClusteringPoints(const EmbeddingSet& embeddings);

}  // namespace sas

#endif  // SAS_PARTITION_H_
