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

#include <cmath>
#include <numeric>
#include <random>

#include "gtest/gtest.h"
#include "sas/partition.h"
#include "sas/similarity.h"
#include "test_support.h"

namespace sas {
namespace {

using Set = std::vector<std::size_t>;

Set Iota(std::size_t n) {
  Set v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

TEST(CenterErrorTest, IdenticalEmbeddingsGiveZero) {
  EmbeddingSet e(3, 2, 2, std::vector<float>(12, 0.5f));
  const Set all = Iota(3);
  const Eigen::MatrixXd d = ExpectedAugmentationDistance(e, all);
  EXPECT_EQ(CenterError(Set{1}, d), 0.0);
  EXPECT_EQ(CenterError(all, d), 0.0);
}

TEST(CenterErrorTest, FullGridOfTwoOrthogonalPoints) {
  EmbeddingSet e(2, 1, 2, {1, 0, 0, 1});
  const Set all = Iota(2);
  const Eigen::MatrixXd d = ExpectedAugmentationDistance(e, all);
  // Cells 0, sqrt2, sqrt2, 0.
  EXPECT_NEAR(CenterError(all, d), std::sqrt(2.0) / 2.0, 1e-12);
  EXPECT_THROW(CenterError(Set{}, d), ValidationError);
}

TEST(AlignmentErrorTest, FullSubsetIsZero) {
  EmbeddingSet e(2, 1, 2, {1, 0, 0, 1});
  const Eigen::MatrixXd d = ExpectedAugmentationDistance(e, Iota(2));
  EXPECT_EQ(AlignmentError(Iota(2), d), 0.0);
  EXPECT_THROW(AlignmentError(Set{}, d), ValidationError);
}

TEST(AlignmentErrorTest, NearestSelectedDistance) {
  EmbeddingSet e(3, 1, 2, {1, 0, 0, 1, 1, 0});
  const Eigen::MatrixXd d = ExpectedAugmentationDistance(e, Iota(3));
  EXPECT_NEAR(AlignmentError(Set{0}, d), std::sqrt(2.0), 1e-12);
}

TEST(AlignmentErrorTest, NonIncreasingUnderAddition) {
  std::mt19937_64 rng(3);
  const auto data = testing::GaussianMixture(1, 25, 6, 2, 8);
  const Eigen::MatrixXd d = ExpectedAugmentationDistance(data.embeddings, Iota(25));
  for (int trial = 0; trial < 200; ++trial) {
    Set s = testing::RandomSubset(25, 0.3, rng);
    if (s.empty()) s.push_back(0);
    const double before = AlignmentError(s, d);
    for (std::size_t e = 0; e < 25; ++e) {
      if (std::find(s.begin(), s.end(), e) != s.end()) continue;
      Set bigger = s;
      bigger.push_back(e);
      ASSERT_LE(AlignmentError(bigger, d), before + 1e-12);
    }
  }
}

TEST(AlignmentLossTest, IdenticalViewsGiveZero) {
  EmbeddingSet e(2, 3, 2, {1, 2, 1, 2, 1, 2, 3, 4, 3, 4, 3, 4});
  EXPECT_EQ(AlignmentLoss(e, Iota(2)), 0.0);
}

TEST(AlignmentLossTest, SingleOrthogonalPair) {
  EmbeddingSet e(1, 2, 2, {1, 0, 0, 1});
  EXPECT_DOUBLE_EQ(AlignmentLoss(e, Set{0}), 2.0);
}

TEST(AlignmentLossTest, SingleViewIsAnError) {
  EmbeddingSet e(2, 1, 2, {1, 0, 0, 1});
  EXPECT_THROW(AlignmentLoss(e, Set{0}), ValidationError);
}

TEST(AlignmentLossTest, AveragesOverExamplesAndOrderedPairs) {
  // Example 0: views (0,0),(1,0),(0,2): squared distances 1, 4, 5 (each
  // twice over ordered pairs) -> mean 10/3. Example 1: identical views -> 0.
  EmbeddingSet e(2, 3, 2, {0, 0, 1, 0, 0, 2, 5, 5, 5, 5, 5, 5});
  EXPECT_NEAR(AlignmentLoss(e, Set{0}), 10.0 / 3.0, 1e-12);
  EXPECT_NEAR(AlignmentLoss(e, Set{0, 1}), 5.0 / 3.0, 1e-12);
}

TEST(DivergenceTest, OrthogonalCenters) {
  EmbeddingSet e(2, 1, 2, {1, 0, 0, 1});
  const std::vector<std::int64_t> labels = {0, 1};
  const Eigen::MatrixXd div = ClassCenterDivergence(e, PartitionFromLabels(labels));
  ASSERT_EQ(div.rows(), 2);
  EXPECT_EQ(div(0, 1), 0.0);
  EXPECT_EQ(div(1, 0), 0.0);
  EXPECT_EQ(div(0, 0), 1.0);
}

TEST(DivergenceTest, OneClassIsSquaredNormOfCenter) {
  EmbeddingSet e(2, 2, 2, {1, 0, 1, 0, 0, 1, 0, 1});
  const std::vector<std::int64_t> labels = {4, 4};
  const Eigen::MatrixXd div = ClassCenterDivergence(e, PartitionFromLabels(labels));
  ASSERT_EQ(div.rows(), 1);
  EXPECT_DOUBLE_EQ(div(0, 0), 0.5);  // center (0.5, 0.5)
}

TEST(DivergenceTest, MergingIdenticalClassesKeepsCenters) {
  const auto data = testing::GaussianMixture(1, 10, 4, 2, 6);
  // Duplicate the examples: class A = original, class B = copy.
  RowMatrixXf twice(data.embeddings.views().rows() * 2, data.embeddings.views().cols());
  twice << data.embeddings.views(), data.embeddings.views();
  EmbeddingSet dup(twice, 2);
  std::vector<std::int64_t> split(20, 0), merged(20, 0);
  for (std::size_t i = 10; i < 20; ++i) split[i] = 1;
  const Eigen::MatrixXd a = ClassCenterDivergence(dup, PartitionFromLabels(split));
  const Eigen::MatrixXd b = ClassCenterDivergence(dup, PartitionFromLabels(merged));
  // Oracle: the center of the original class, by direct averaging.
  Eigen::RowVectorXd mu = Eigen::RowVectorXd::Zero(4);
  for (Eigen::Index r = 0; r < 20; ++r) mu += data.embeddings.views().row(r).cast<double>();
  mu /= 20.0;
  EXPECT_NEAR(a(0, 0), mu.squaredNorm(), 1e-12);
  EXPECT_NEAR(a(1, 1), mu.squaredNorm(), 1e-12);
  EXPECT_NEAR(a(0, 1), mu.squaredNorm(), 1e-12);
  EXPECT_NEAR(b(0, 0), mu.squaredNorm(), 1e-12);
}

TEST(DivergenceTest, SymmetricWithNonnegativeDiagonal) {
  const auto data = testing::GaussianMixture(5, 8, 6, 2, 12);
  const Eigen::MatrixXd div =
      ClassCenterDivergence(data.embeddings, PartitionFromLabels(data.labels));
  EXPECT_TRUE(div == div.transpose());
  EXPECT_TRUE((div.diagonal().array() >= 0.0).all());
}

TEST(ClassDiagnosticsTest, MatchesBruteForceFromRawEmbeddings) {
  const auto data = testing::GaussianMixture(2, 15, 5, 2, 13);
  const Set members = {0, 2, 4, 6, 8, 10, 12, 14, 16, 18};
  const Set subset = {1, 4, 7};  // local
  const Eigen::MatrixXd d = ExpectedAugmentationDistance(data.embeddings, members);
  const ClassDiagnostics diag = ComputeClassDiagnostics(data.embeddings, members, subset, d);

  double center = 0.0, align = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    double best = INFINITY;
    for (std::size_t j : subset) {
      const double dij = testing::BruteDistance(data.embeddings, members[i], members[j]);
      center += dij;
      best = std::min(best, dij);
    }
    if (std::find(subset.begin(), subset.end(), i) == subset.end()) align += best;
  }
  center /= static_cast<double>(members.size() * subset.size());
  EXPECT_LE(testing::RelativeError(diag.center_error, center), 1e-6);
  EXPECT_LE(testing::RelativeError(diag.alignment_error, align), 1e-6);
  ASSERT_TRUE(diag.alignment_loss_subset && diag.alignment_loss_full);
  EXPECT_GE(*diag.alignment_loss_subset, 0.0);
}

TEST(RandomBaselineTest, SeededAndSized) {
  const auto data = testing::GaussianMixture(1, 30, 4, 2, 14);
  const Set members = Iota(30);
  const Eigen::MatrixXd d = ExpectedAugmentationDistance(data.embeddings, members);
  const RandomBaseline a = ComputeRandomBaseline(data.embeddings, members, 10, d, 20, 5);
  const RandomBaseline b = ComputeRandomBaseline(data.embeddings, members, 10, d, 20, 5);
  const RandomBaseline c = ComputeRandomBaseline(data.embeddings, members, 10, d, 20, 6);
  EXPECT_EQ(a.count, 20u);
  EXPECT_EQ(a.subset_size, 10u);
  EXPECT_EQ(a.center_error_mean, b.center_error_mean);
  EXPECT_EQ(a.alignment_error_mean, b.alignment_error_mean);
  EXPECT_NE(a.alignment_error_mean, c.alignment_error_mean);
  EXPECT_TRUE(a.alignment_loss_mean.has_value());
}

}  // namespace
}  // namespace sas
