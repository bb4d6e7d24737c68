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

#include "sas/partition.h"

#include <algorithm>
#include <limits>
#include <random>
#include <string>

#include "sas/parallel.h"
#include "sas/random.h"

namespace sas {

LatentPartition PartitionFromLabels(std::span<const std::int64_t> labels) {
  std::vector<std::int64_t> values(labels.begin(), labels.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<std::size_t> ids(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ids[i] = static_cast<std::size_t>(
        std::lower_bound(values.begin(), values.end(), labels[i]) - values.begin());
  }
  auto p = LatentPartition::FromAssignments(ids, values.size());
  p.set_origin(std::move(values));
  return p;
}

LatentPartition PartitionFromLabels(std::span<const std::int64_t> labels, std::size_t n) {
  if (labels.size() != n) {
    throw ValidationError("label count " + std::to_string(labels.size()) +
                          " does not match example count " + std::to_string(n));
  }
  return PartitionFromLabels(labels);
}

RowMatrixXd ClusteringPoints(const EmbeddingSet& embeddings) {
  RowMatrixXd points(static_cast<Eigen::Index>(embeddings.n()),
                     static_cast<Eigen::Index>(embeddings.d()));
  for (std::size_t i = 0; i < embeddings.n(); ++i) {
    points.row(static_cast<Eigen::Index>(i)) = embeddings.ViewMean(i);
  }
  return points;
}

namespace {

RowMatrixXd SeedPlusPlus(const RowMatrixXd& points, std::size_t k, std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(points.rows());
  RowMatrixXd centroids(static_cast<Eigen::Index>(k), points.cols());
  std::vector<bool> chosen(n, false);
  std::size_t first = std::min(n - 1, static_cast<std::size_t>(UniformUnit(rng) * n));
  centroids.row(0) = points.row(static_cast<Eigen::Index>(first));
  chosen[first] = true;

  std::vector<double> weight(n);
  for (std::size_t i = 0; i < n; ++i) {
    weight[i] = (points.row(static_cast<Eigen::Index>(i)) - centroids.row(0)).squaredNorm();
  }
  weight[first] = 0.0;

  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double w : weight) total += w;
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = UniformUnit(rng) * total;
      double cumulative = 0.0;
      std::size_t last_positive = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (weight[i] <= 0.0) continue;
        last_positive = i;
        cumulative += weight[i];
        if (cumulative > target) {
          pick = i;
          break;
        }
      }
      if (pick == n) pick = last_positive;
    } else {
      // Every remaining point coincides with a centroid.
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) {
          pick = i;
          break;
        }
      }
    }
    chosen[pick] = true;
    centroids.row(static_cast<Eigen::Index>(c)) = points.row(static_cast<Eigen::Index>(pick));
    for (std::size_t i = 0; i < n; ++i) {
      const double dist = (points.row(static_cast<Eigen::Index>(i)) -
                           centroids.row(static_cast<Eigen::Index>(c)))
                              .squaredNorm();
      weight[i] = std::min(weight[i], dist);
    }
    weight[pick] = 0.0;
  }
  return centroids;
}

}  // namespace

KMeansResult KMeans(const RowMatrixXd& points, const KMeansOptions& options) {
  const auto n = static_cast<std::size_t>(points.rows());
  const std::size_t k = options.k;
  if (k < 1) throw ValidationError("kmeans K must be at least 1");
  if (k > n) {
    throw ValidationError("kmeans K=" + std::to_string(k) + " exceeds the number of examples " +
                          std::to_string(n));
  }
  std::mt19937_64 rng(options.seed);
  KMeansResult result;
  result.centroids = SeedPlusPlus(points, k, rng);
  result.assignments.assign(n, 0);
  std::vector<double> dist(n, 0.0);

  for (std::size_t iter = 0; iter < options.max_iters; ++iter) {
    ParallelFor(n, options.threads, [&](std::size_t i) {
      const auto p = points.row(static_cast<Eigen::Index>(i));
      std::size_t best = 0;
      double best_dist = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d2 = (p - result.centroids.row(static_cast<Eigen::Index>(c))).squaredNorm();
        if (d2 < best_dist) {
          best_dist = d2;
          best = c;
        }
      }
      result.assignments[i] = best;
      dist[i] = best_dist;
    });

    std::vector<std::size_t> counts(k, 0);
    for (std::size_t a : result.assignments) ++counts[a];
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = n;
      double far_dist = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[result.assignments[i]] > 1 && dist[i] > far_dist) {
          far_dist = dist[i];
          far = i;
        }
      }
      if (far == n) break;  // remaining points sit exactly on their centroids
      --counts[result.assignments[far]];
      result.assignments[far] = c;
      counts[c] = 1;
      dist[far] = 0.0;
    }

    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < n; ++i) members[result.assignments[i]].push_back(i);
    RowMatrixXd updated = result.centroids;
    ParallelFor(k, options.threads, [&](std::size_t c) {
      if (members[c].empty()) return;
      Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(points.cols());
      for (std::size_t i : members[c]) sum += points.row(static_cast<Eigen::Index>(i));
      updated.row(static_cast<Eigen::Index>(c)) = sum / static_cast<double>(members[c].size());
    });

    double movement = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      const auto row = static_cast<Eigen::Index>(c);
      movement = std::max(movement, (updated.row(row) - result.centroids.row(row)).norm());
    }
    result.centroids = std::move(updated);

    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      objective += (points.row(static_cast<Eigen::Index>(i)) -
                    result.centroids.row(static_cast<Eigen::Index>(result.assignments[i])))
                       .squaredNorm();
    }
    result.objective_history.push_back(objective);
    result.iterations = iter + 1;
    if (movement < options.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

LatentPartition KMeansPartition(const EmbeddingSet& embeddings, const KMeansOptions& options) {
  const KMeansResult km = KMeans(ClusteringPoints(embeddings), options);
  return LatentPartition::FromAssignments(km.assignments, options.k);
}

}  // namespace sas
