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

#ifndef SAS_TYPES_H_
#define SAS_TYPES_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sas {

// Input is malformed or violates a precondition. CLI maps this to exit 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem or format-level failure. CLI maps this to exit 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using RowMatrixXf = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// n examples, m views each, d dims per view. Values are stored as one
// (n*m) x d row-major block, grouped example -> view -> dim, which is also
// the on-disk payload order.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  // Throws ValidationError on zero extents, size mismatch or non-finite values.
  EmbeddingSet(std::size_t n, std::size_t m, std::size_t d, std::vector<float> values,
               bool normalized = false);
  EmbeddingSet(const RowMatrixXf& views, std::size_t m, bool normalized = false);

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }
  std::size_t d() const { return d_; }
  bool normalized() const { return normalized_; }

  const RowMatrixXf& views() const { return views_; }
  auto view(std::size_t example, std::size_t v) const {
    return views_.row(static_cast<Eigen::Index>(example * m_ + v));
  }
  // All m views of one example as an m x d block.
  auto example(std::size_t i) const {
    return views_.middleRows(static_cast<Eigen::Index>(i * m_), static_cast<Eigen::Index>(m_));
  }
  const float* data() const { return views_.data(); }
  std::size_t size() const { return n_ * m_ * d_; }

  // Mean of an example's views, accumulated in double.
  Eigen::RowVectorXd ViewMean(std::size_t i) const;

  // Returns a copy with every view vector scaled to unit L2 norm.
  // Throws ValidationError("zero vector cannot be normalized") on a zero view.
  EmbeddingSet Normalized() const;

  friend bool operator==(const EmbeddingSet& a, const EmbeddingSet& b);

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::size_t d_ = 0;
  bool normalized_ = false;
  RowMatrixXf views_;
};

struct ValidationIssue {
  bool hard = true;
  std::string message;
};

struct ValidationReport {
  bool valid = true;
  std::size_t n = 0, m = 0, d = 0;
  double min_norm = 0.0;
  double max_norm = 0.0;
  double mean_norm = 0.0;
  std::size_t zero_vectors = 0;
  std::vector<ValidationIssue> issues;
};

// Non-mutating inspection. `normalize_requested` turns zero-norm views into
// hard errors since they cannot be normalized later.
ValidationReport Validate(const EmbeddingSet& embeddings, bool normalize_requested = false);

// Raw-buffer check used before an EmbeddingSet exists (e.g. while decoding a
// file). Returns the first offending (example, view, dim) or nullopt.
struct ValueLocation {
  std::size_t example, view, dim;
};
std::optional<ValueLocation> FindNonFinite(const float* values, std::size_t n, std::size_t m,
                                           std::size_t d);

// Assignment of examples to K non-empty latent classes.
class LatentPartition {
 public:
  LatentPartition() = default;
  // `assignments[i]` is a raw class id in [0, raw_k). Empty raw classes are
  // dropped and the remaining ids compacted in ascending order; `origin()`
  // maps compact ids back to the raw id.
  static LatentPartition FromAssignments(const std::vector<std::size_t>& assignments,
                                         std::size_t raw_k);

  std::size_t n() const { return assignments_.size(); }
  std::size_t k() const { return members_.size(); }
  const std::vector<std::size_t>& assignments() const { return assignments_; }
  const std::vector<std::size_t>& members(std::size_t class_id) const {
    return members_.at(class_id);
  }
  const std::vector<std::vector<std::size_t>>& class_members() const { return members_; }
  std::vector<std::size_t> sizes() const;
  // Raw id (label value index or cluster id) each compact class came from.
  const std::vector<std::int64_t>& origin() const { return origin_; }
  void set_origin(std::vector<std::int64_t> origin) { origin_ = std::move(origin); }

 private:
  std::vector<std::size_t> assignments_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::int64_t> origin_;
};

enum class PartitionSource { kLabels, kKMeans };

struct SelectionConfig {
  std::optional<double> budget_fraction;
  std::optional<std::size_t> budget_total;
  double tau = 0.0;
  bool refine = true;
  bool normalize = true;
  std::uint64_t seed = 0;
  PartitionSource partition_source = PartitionSource::kLabels;
  std::size_t kmeans_k = 0;
  std::size_t kmeans_iters = 100;
  double kmeans_tol = 1e-4;
  std::size_t baseline_count = 20;
  // Compute per-class diagnostics (needs the O(n_k^2 m^2 d) distance matrix).
  bool diagnostics = true;
  std::size_t threads = 1;
  // Upper bound on one class's dense n_k x n_k double matrix.
  std::size_t max_matrix_bytes = std::size_t{8} << 30;
  std::string embedding_source = "unspecified";

  // Throws ValidationError unless exactly one budget form is set and in range,
  // tau is finite and K (when clustering) lies in [1, n].
  void Check(std::size_t n) const;
  // Total budget B for a dataset of n examples.
  std::size_t TotalBudget(std::size_t n) const;
};

struct ClassDiagnostics {
  double center_error = 0.0;
  double alignment_error = 0.0;
  std::optional<double> alignment_loss_subset;
  std::optional<double> alignment_loss_full;
};

struct RandomBaseline {
  std::size_t count = 0;
  std::size_t subset_size = 0;
  double center_error_mean = 0.0;
  double alignment_error_mean = 0.0;
  std::optional<double> alignment_loss_mean;
};

struct ClassResult {
  std::size_t class_id = 0;
  std::size_t size = 0;
  std::size_t budget = 0;
  std::size_t final_size = 0;
  std::vector<std::size_t> selected;  // sorted global indices
  double objective_greedy = 0.0;
  double objective_refined = 0.0;
  std::optional<ClassDiagnostics> diagnostics;
  std::optional<RandomBaseline> random_baseline;
};

struct SelectionResult {
  SelectionConfig config;
  std::size_t n = 0;
  std::size_t total_budget = 0;
  std::uint64_t input_checksum = 0;
  std::uint64_t partition_checksum = 0;
  std::vector<ClassResult> classes;
  // Inner products of class centers over the full data and over the subset.
  Eigen::MatrixXd divergence_full;
  Eigen::MatrixXd divergence_subset;
  std::size_t total_selected = 0;

  std::vector<std::size_t> AllSelected() const;
};

}  // namespace sas

#endif  // SAS_TYPES_H_
