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

#ifndef SAS_SIMILARITY_H_
#define SAS_SIMILARITY_H_

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sas/types.h"

namespace sas {

// Thresholded expected augmentation similarities within one latent class.
// `s` is symmetric, nonnegative, with a zero diagonal. Local index r refers
// to global example `local_to_global[r]`.
struct SimilarityMatrix {
  std::size_t class_id = 0;
  std::vector<std::size_t> local_to_global;
  Eigen::MatrixXd s;
  double tau = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(s.rows()); }
};

struct SimilarityOptions {
  std::size_t threads = 1;
  std::size_t max_matrix_bytes = std::numeric_limits<std::size_t>::max();
};

// Throws ValidationError when an n x n double matrix would exceed the cap.
void CheckMatrixBudget(std::size_t n, std::size_t max_matrix_bytes);

// Mean L2 distance over all m^2 view pairs, for every pair of class members.
// The diagonal holds each example's mean distance among its own views.
Eigen::MatrixXd ExpectedAugmentationDistance(const EmbeddingSet& embeddings,
                                             std::span<const std::size_t> members,
                                             const SimilarityOptions& options = {});

// Mean inner product over all m^2 view pairs, unthresholded, diagonal kept.
// By bilinearity this equals the inner product of the view means, which is
// how it is evaluated.
Eigen::MatrixXd RawAugmentationSimilarity(const EmbeddingSet& embeddings,
                                          std::span<const std::size_t> members,
                                          const SimilarityOptions& options = {});

// s_ij = raw_ij if raw_ij > tau else 0, with the diagonal cleared. Negative
// values are cleared for every tau so the objective stays submodular.
template <typename Derived>
Eigen::MatrixXd ApplyThreshold(const Eigen::MatrixBase<Derived>& raw, double tau) {
  const Eigen::MatrixXd values = raw.template cast<double>();
  Eigen::MatrixXd s = (values.array() > tau && values.array() > 0.0).select(values, 0.0);
  s.diagonal().setZero();
  return s;
}

SimilarityMatrix ExpectedAugmentationSimilarity(const EmbeddingSet& embeddings,
                                                std::span<const std::size_t> members, double tau,
                                                const SimilarityOptions& options = {});

}  // namespace sas

#endif  // SAS_SIMILARITY_H_
