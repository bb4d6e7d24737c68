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

#include "sas/types.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sas {

namespace {

std::string LocationString(const ValueLocation& loc) {
  std::ostringstream os;
  os << "non-finite value at (" << loc.example << "," << loc.view << "," << loc.dim << ")";
  return os.str();
}

}  // namespace

std::optional<ValueLocation> FindNonFinite(const float* values, std::size_t n, std::size_t m,
                                           std::size_t d) {
  const std::size_t total = n * m * d;
  for (std::size_t k = 0; k < total; ++k) {
    if (!std::isfinite(values[k])) {
      return ValueLocation{k / (m * d), (k / d) % m, k % d};
    }
  }
  return std::nullopt;
}

EmbeddingSet::EmbeddingSet(std::size_t n, std::size_t m, std::size_t d, std::vector<float> values,
                           bool normalized)
    : n_(n), m_(m), d_(d), normalized_(normalized) {
  if (n == 0 || m == 0 || d == 0) {
    throw ValidationError("embedding extents must be positive (n, m, d >= 1)");
  }
  if (values.size() != n * m * d) {
    throw ValidationError("embedding buffer holds " + std::to_string(values.size()) +
                          " values, expected n*m*d = " + std::to_string(n * m * d));
  }
  if (auto loc = FindNonFinite(values.data(), n, m, d)) {
    throw ValidationError(LocationString(*loc));
  }
  views_ = Eigen::Map<const RowMatrixXf>(values.data(), static_cast<Eigen::Index>(n * m),
                                         static_cast<Eigen::Index>(d));
}

EmbeddingSet::EmbeddingSet(const RowMatrixXf& views, std::size_t m, bool normalized)
    : m_(m), normalized_(normalized), views_(views) {
  if (m == 0 || views.rows() == 0 || views.cols() == 0 ||
      static_cast<std::size_t>(views.rows()) % m != 0) {
    throw ValidationError("view matrix rows must be a positive multiple of m");
  }
  n_ = static_cast<std::size_t>(views.rows()) / m;
  d_ = static_cast<std::size_t>(views.cols());
  if (auto loc = FindNonFinite(views_.data(), n_, m_, d_)) {
    throw ValidationError(LocationString(*loc));
  }
}

Eigen::RowVectorXd EmbeddingSet::ViewMean(std::size_t i) const {
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(d_));
  for (std::size_t v = 0; v < m_; ++v) mean += view(i, v).cast<double>();
  return mean / static_cast<double>(m_);
}

EmbeddingSet EmbeddingSet::Normalized() const {
  RowMatrixXf out = views_;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double norm = out.row(r).cast<double>().norm();
    if (norm == 0.0) {
      throw ValidationError("zero vector cannot be normalized (example " +
                            std::to_string(static_cast<std::size_t>(r) / m_) + ", view " +
                            std::to_string(static_cast<std::size_t>(r) % m_) + ")");
    }
    out.row(r) = (out.row(r).cast<double>() / norm).cast<float>();
  }
  return EmbeddingSet(out, m_, /*normalized=*/true);
}

bool operator==(const EmbeddingSet& a, const EmbeddingSet& b) {
  return a.n_ == b.n_ && a.m_ == b.m_ && a.d_ == b.d_ && a.normalized_ == b.normalized_ &&
         a.views_ == b.views_;
}

ValidationReport Validate(const EmbeddingSet& embeddings, bool normalize_requested) {
  ValidationReport report;
  report.n = embeddings.n();
  report.m = embeddings.m();
  report.d = embeddings.d();
  if (report.n == 0 || report.m == 0 || report.d == 0) {
    report.valid = false;
    report.issues.push_back({true, "embedding set is empty"});
    return report;
  }
  if (auto loc = FindNonFinite(embeddings.data(), report.n, report.m, report.d)) {
    report.valid = false;
    report.issues.push_back({true, LocationString(*loc)});
    return report;
  }
  const auto& views = embeddings.views();
  double sum = 0.0;
  report.min_norm = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < views.rows(); ++r) {
    const double norm = views.row(r).cast<double>().norm();
    report.min_norm = std::min(report.min_norm, norm);
    report.max_norm = std::max(report.max_norm, norm);
    sum += norm;
    if (norm == 0.0) {
      ++report.zero_vectors;
      if (normalize_requested && report.zero_vectors == 1) {
        report.valid = false;
        report.issues.push_back(
            {true, "zero vector cannot be normalized (example " +
                       std::to_string(static_cast<std::size_t>(r) / report.m) + ", view " +
                       std::to_string(static_cast<std::size_t>(r) % report.m) + ")"});
      }
    }
    if (embeddings.normalized() && std::abs(norm - 1.0) > 1e-4) {
      report.valid = false;
      report.issues.push_back({true, "view at row " + std::to_string(r) +
                                         " is flagged normalized but has norm " +
                                         std::to_string(norm)});
    }
  }
  report.mean_norm = sum / static_cast<double>(views.rows());
  return report;
}

LatentPartition LatentPartition::FromAssignments(const std::vector<std::size_t>& assignments,
                                                 std::size_t raw_k) {
  std::vector<std::size_t> counts(raw_k, 0);
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] >= raw_k) {
      throw ValidationError("class id " + std::to_string(assignments[i]) + " of example " +
                            std::to_string(i) + " is out of range [0, " + std::to_string(raw_k) +
                            ")");
    }
    ++counts[assignments[i]];
  }
  std::vector<std::size_t> remap(raw_k, 0);
  LatentPartition p;
  for (std::size_t c = 0; c < raw_k; ++c) {
    if (counts[c] == 0) continue;
    remap[c] = p.origin_.size();
    p.origin_.push_back(static_cast<std::int64_t>(c));
  }
  p.members_.resize(p.origin_.size());
  for (std::size_t k = 0; k < p.origin_.size(); ++k) {
    p.members_[k].reserve(counts[static_cast<std::size_t>(p.origin_[k])]);
  }
  p.assignments_.resize(assignments.size());
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    p.assignments_[i] = remap[assignments[i]];
    p.members_[p.assignments_[i]].push_back(i);
  }
  return p;
}

std::vector<std::size_t> LatentPartition::sizes() const {
  std::vector<std::size_t> out;
  out.reserve(members_.size());
  for (const auto& m : members_) out.push_back(m.size());
  return out;
}

void SelectionConfig::Check(std::size_t n) const {
  if (budget_fraction.has_value() == budget_total.has_value()) {
    throw ValidationError("exactly one of budget_fraction and budget_total must be set");
  }
  if (budget_fraction && !(*budget_fraction > 0.0 && *budget_fraction <= 1.0)) {
    throw ValidationError("budget_fraction must lie in (0, 1]");
  }
  if (budget_total && *budget_total > n) {
    throw ValidationError("budget_total " + std::to_string(*budget_total) +
                          " exceeds the number of examples " + std::to_string(n));
  }
  if (!std::isfinite(tau)) throw ValidationError("tau must be finite");
  if (partition_source == PartitionSource::kKMeans && (kmeans_k < 1 || kmeans_k > n)) {
    throw ValidationError("kmeans K must lie in [1, n]");
  }
}

std::size_t SelectionConfig::TotalBudget(std::size_t n) const {
  if (budget_total) return *budget_total;
  // Absorb representation error such as 0.29 * 100 = 28.999999999999996.
  const double raw = *budget_fraction * static_cast<double>(n);
  const auto b = static_cast<std::size_t>(std::floor(raw + 1e-9));
  return std::min(b, n);
}

std::vector<std::size_t> SelectionResult::AllSelected() const {
  std::vector<std::size_t> out;
  for (const auto& c : classes) out.insert(out.end(), c.selected.begin(), c.selected.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sas
