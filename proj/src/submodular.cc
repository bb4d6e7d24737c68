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

#include "sas/submodular.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace sas {

GreedyState::GreedyState(const Eigen::MatrixXd& s)
    : s_(s),
      column_total_(static_cast<std::size_t>(s.rows()), 0.0),
      selected_sum_(static_cast<std::size_t>(s.rows()), 0.0),
      in_set_(static_cast<std::size_t>(s.rows()), 0) {
  if (s.rows() != s.cols()) throw std::invalid_argument("similarity matrix must be square");
  const Eigen::Index n = s.rows();
  for (Eigen::Index e = 0; e < n; ++e) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != e) total += s(i, e);
    }
    column_total_[static_cast<std::size_t>(e)] = total;
  }
}

double GreedyState::Gain(std::size_t e) const {
  if (contains(e)) {
    throw std::invalid_argument("element " + std::to_string(e) + " is already selected");
  }
  return OutsideSum(e) - selected_sum_[e];
}

void GreedyState::Commit(std::size_t e) {
  objective_ += Gain(e);
  in_set_[e] = 1;
  selected_.push_back(e);
  const auto col = static_cast<Eigen::Index>(e);
  for (std::size_t u = 0; u < selected_sum_.size(); ++u) {
    if (u != e) selected_sum_[u] += s_(static_cast<Eigen::Index>(u), col);
  }
}

namespace {

struct HeapEntry {
  double bound;
  std::size_t index;
  std::size_t round;
};

// Max-heap order: larger bound first, then lower index.
struct HeapLess {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.index > b.index;
  }
};

void VerifyObjective(const GreedyState& state, const Eigen::MatrixXd& s) {
  const double direct = Objective(std::span<const std::size_t>(state.selected()), s);
  const double scale = std::max({1.0, std::abs(direct), std::abs(state.objective())});
  if (std::abs(direct - state.objective()) > 1e-9 * scale) {
    throw std::logic_error("incremental objective " + std::to_string(state.objective()) +
                           " drifted from direct value " + std::to_string(direct));
  }
}

}  // namespace

GreedyOutput GreedySelect(const Eigen::MatrixXd& s, std::size_t budget,
                          const GreedyOptions& options) {
  const auto n = static_cast<std::size_t>(s.rows());
  if (budget > n) {
    throw std::invalid_argument("budget " + std::to_string(budget) + " exceeds class size " +
                                std::to_string(n));
  }
  GreedyState state(s);
  GreedyOutput out;
  out.order.reserve(budget);

  std::vector<HeapEntry> init;
  init.reserve(n);
  for (std::size_t e = 0; e < n; ++e) init.push_back({state.Gain(e), e, 0});
  out.gain_evaluations = n;
  std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapLess> heap(HeapLess{},
                                                                        std::move(init));

  for (std::size_t round = 0; round < budget; ++round) {
    while (true) {
      HeapEntry top = heap.top();
      heap.pop();
      if (top.round == round) {
        state.Commit(top.index);
        out.order.push_back(top.index);
        break;
      }
      heap.push({state.Gain(top.index), top.index, round});
      ++out.gain_evaluations;
    }
    if (options.verify_objective) VerifyObjective(state, s);
  }
  out.objective = state.objective();
  return out;
}

RefineOutput DoubleGreedyRefine(std::span<const std::size_t> candidates,
                                const Eigen::MatrixXd& s) {
  const auto n = static_cast<std::size_t>(s.rows());
  std::vector<std::size_t> ground(candidates.begin(), candidates.end());
  std::sort(ground.begin(), ground.end());
  if (std::adjacent_find(ground.begin(), ground.end()) != ground.end()) {
    throw std::invalid_argument("refinement candidates must be distinct");
  }
  for (std::size_t e : ground) {
    if (e >= n) throw std::invalid_argument("refinement candidate out of range");
  }
  const std::size_t k = ground.size();

  // Column totals over the full class, and for every candidate its summed
  // similarity to the current lower (alpha) and upper (beta) sets.
  std::vector<double> total(k, 0.0), to_lower(k, 0.0), to_upper(k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    const auto col = static_cast<Eigen::Index>(ground[a]);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
      if (i != col) total[a] += s(i, col);
    }
    for (std::size_t b = 0; b < k; ++b) {
      if (b != a) to_upper[a] += s(static_cast<Eigen::Index>(ground[b]), col);
    }
  }

  RefineOutput out;
  out.steps.reserve(k);
  double lower = 0.0;
  double upper = Objective(std::span<const std::size_t>(ground), s);
  for (std::size_t a = 0; a < k; ++a) {
    RefineStep step;
    step.element = ground[a];
    step.gain_add = total[a] - 2.0 * to_lower[a];
    step.gain_remove = 2.0 * to_upper[a] - total[a];
    step.kept = step.gain_add >= step.gain_remove;
    const auto col = static_cast<Eigen::Index>(ground[a]);
    if (step.kept) {
      lower += step.gain_add;
      out.selected.push_back(ground[a]);
      for (std::size_t b = a + 1; b < k; ++b) {
        to_lower[b] += s(static_cast<Eigen::Index>(ground[b]), col);
      }
    } else {
      upper += step.gain_remove;
      for (std::size_t b = a + 1; b < k; ++b) {
        to_upper[b] -= s(static_cast<Eigen::Index>(ground[b]), col);
      }
    }
    step.lower_objective = lower;
    step.upper_objective = upper;
    out.steps.push_back(step);
  }
  out.objective = Objective(std::span<const std::size_t>(out.selected), s);
  return out;
}

std::vector<std::size_t> AllocateBudgets(std::span<const std::size_t> class_sizes,
                                         std::size_t total_budget) {
  const std::size_t k = class_sizes.size();
  const std::size_t n = std::accumulate(class_sizes.begin(), class_sizes.end(), std::size_t{0});
  if (total_budget > n) {
    throw std::invalid_argument("budget " + std::to_string(total_budget) +
                                " exceeds the number of examples " + std::to_string(n));
  }
  std::vector<std::size_t> budget(k, 0);
  std::vector<char> capped(k, 0);
  std::size_t remaining = total_budget;

  while (remaining > 0) {
    unsigned __int128 pool = 0;
    for (std::size_t c = 0; c < k; ++c) {
      if (!capped[c]) pool += class_sizes[c];
    }
    if (pool == 0) break;
    std::vector<std::size_t> share(k, 0);
    std::vector<unsigned __int128> remainder(k, 0);
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < k; ++c) {
      if (capped[c]) continue;
      const unsigned __int128 scaled =
          static_cast<unsigned __int128>(class_sizes[c]) * remaining;
      share[c] = static_cast<std::size_t>(scaled / pool);
      remainder[c] = scaled % pool;
      assigned += share[c];
    }
    std::vector<std::size_t> order;
    for (std::size_t c = 0; c < k; ++c) {
      if (!capped[c]) order.push_back(c);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return remainder[a] > remainder[b];
    });
    for (std::size_t t = 0; t < remaining - assigned; ++t) ++share[order[t]];

    bool newly_capped = false;
    for (std::size_t c = 0; c < k; ++c) {
      if (capped[c]) continue;
      const std::size_t room = class_sizes[c] - budget[c];
      if (share[c] >= room) {
        budget[c] += room;
        remaining -= room;
        capped[c] = 1;
        newly_capped = newly_capped || share[c] > room;
      }
    }
    if (newly_capped) {
      // Undo partial shares of uncapped classes and redistribute among them.
      continue;
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (!capped[c]) budget[c] += share[c];
    }
    remaining = 0;
  }
  return budget;
}

}  // namespace sas
