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

#ifndef SAS_SUBMODULAR_H_
#define SAS_SUBMODULAR_H_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sas/types.h"

namespace sas {

// F(S) = sum_{i not in S} sum_{j in S} s_ij, by direct summation over the
// class. This is the reference the incremental paths are checked against.
template <typename Derived>
double Objective(std::span<const std::size_t> subset, const Eigen::MatrixBase<Derived>& s) {
  const auto n = static_cast<std::size_t>(s.rows());
  std::vector<char> in_set(n, 0);
  for (std::size_t j : subset) in_set.at(j) = 1;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_set[i]) continue;
    for (std::size_t j : subset) {
      total += static_cast<double>(s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
  }
  return total;
}

// F(S + e) - F(S) = sum_{i not in S+e} s_ie - sum_{j in S} s_ej, evaluated
// in O(n). Throws std::invalid_argument when e is already in S.
template <typename Derived>
double MarginalGain(std::size_t e, std::span<const std::size_t> subset,
                    const Eigen::MatrixBase<Derived>& s) {
  const auto n = static_cast<std::size_t>(s.rows());
  std::vector<char> in_set(n, 0);
  for (std::size_t j : subset) in_set.at(j) = 1;
  if (in_set.at(e)) {
    throw std::invalid_argument("element " + std::to_string(e) + " is already selected");
  }
  const auto col = static_cast<Eigen::Index>(e);
  double outside = 0.0;
  double inside = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == e) continue;
    const double v = static_cast<double>(s(static_cast<Eigen::Index>(i), col));
    (in_set[i] ? inside : outside) += v;
  }
  return outside - inside;
}

// Running sums for greedy maximization of F over one class. Holds a
// reference to `s`, which must outlive the state.
class GreedyState {
 public:
  explicit GreedyState(const Eigen::MatrixXd& s);

  std::size_t size() const { return column_total_.size(); }
  bool contains(std::size_t e) const { return in_set_.at(e) != 0; }
  const std::vector<std::size_t>& selected() const { return selected_; }
  double objective() const { return objective_; }

  // sum_{i not in S+e} s_ie
  double OutsideSum(std::size_t e) const { return column_total_[e] - selected_sum_[e]; }
  // sum_{j in S} s_ej
  double SelectedSum(std::size_t e) const { return selected_sum_[e]; }

  // O(1). Throws std::invalid_argument when e is selected.
  double Gain(std::size_t e) const;
  // Adds e, O(n).
  void Commit(std::size_t e);

 private:
  const Eigen::MatrixXd& s_;
  std::vector<double> column_total_;
  std::vector<double> selected_sum_;
  std::vector<char> in_set_;
  std::vector<std::size_t> selected_;
  double objective_ = 0.0;
};

struct GreedyOptions {
  // Recompute F(S) by direct summation after every commit and throw
  // std::logic_error if it drifts more than 1e-9 relative.
  bool verify_objective = false;
};

struct GreedyOutput {
  std::vector<std::size_t> order;  // local indices, selection order
  double objective = 0.0;
  std::size_t gain_evaluations = 0;
};

// Lazy greedy with a max-heap of stale gains. Commits exactly `budget`
// elements, negative gains included; equal gains go to the lowest index.
GreedyOutput GreedySelect(const Eigen::MatrixXd& s, std::size_t budget,
                          const GreedyOptions& options = {});

struct RefineStep {
  std::size_t element = 0;
  double gain_add = 0.0;     // a_e = F(e | S_alpha)
  double gain_remove = 0.0;  // b_e = F(S_beta - e) - F(S_beta)
  bool kept = false;
  double lower_objective = 0.0;  // F(S_alpha) after the step
  double upper_objective = 0.0;  // F(S_beta) after the step
};

struct RefineOutput {
  std::vector<std::size_t> selected;  // sorted local indices
  double objective = 0.0;
  std::vector<RefineStep> steps;
};

// Deterministic double greedy over the ground set `candidates` (scanned in
// ascending order), with F always evaluated over the whole class.
RefineOutput DoubleGreedyRefine(std::span<const std::size_t> candidates,
                                const Eigen::MatrixXd& s);

// Splits B across classes in proportion to their sizes. Largest-remainder
// rounding keeps the sum exactly B; remainder ties go to the lowest class id
// and no class receives more than its size.
std::vector<std::size_t> AllocateBudgets(std::span<const std::size_t> class_sizes,
                                         std::size_t total_budget);

}  // namespace sas

#endif  // SAS_SUBMODULAR_H_
