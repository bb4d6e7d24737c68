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

#include <random>
#include <set>

#include "gtest/gtest.h"
#include "test_support.h"

namespace sas {
namespace {

TEST(LabelPartitionTest, DenseRemapInAscendingOrder) {
  const std::vector<std::int64_t> labels = {7, 7, 2, 2, 2};
  const LatentPartition p = PartitionFromLabels(labels);
  EXPECT_EQ(p.k(), 2u);
  EXPECT_EQ(p.assignments(), (std::vector<std::size_t>{1, 1, 0, 0, 0}));
  EXPECT_EQ(p.origin(), (std::vector<std::int64_t>{2, 7}));
}

TEST(LabelPartitionTest, AllDistinctGivesSingletons) {
  std::vector<std::int64_t> labels(9);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<std::int64_t>(i);
  const LatentPartition p = PartitionFromLabels(labels);
  EXPECT_EQ(p.k(), 9u);
  for (std::size_t c = 0; c < 9; ++c) EXPECT_EQ(p.members(c), std::vector<std::size_t>{c});
}

TEST(LabelPartitionTest, ThousandLabelValuesAndNegatives) {
  std::mt19937_64 rng(4);
  std::vector<std::int64_t> labels(5000);
  for (auto& l : labels) l = static_cast<std::int64_t>(UniformBelow(rng, 1000)) - 500;
  const LatentPartition p = PartitionFromLabels(labels, labels.size());
  EXPECT_EQ(p.k(), std::set<std::int64_t>(labels.begin(), labels.end()).size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ASSERT_EQ(p.origin()[p.assignments()[i]], labels[i]);
  }
}

TEST(LabelPartitionTest, LengthMismatch) {
  const std::vector<std::int64_t> labels = {0, 1};
  EXPECT_THROW(PartitionFromLabels(labels, 3), ValidationError);
}

// Relabeling a partition by its own assignments reproduces its classes.
TEST(LabelPartitionTest, IdentityOnClassStructure) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::int64_t> labels(30);
    for (auto& l : labels) l = static_cast<std::int64_t>(UniformBelow(rng, 40));
    const LatentPartition p = PartitionFromLabels(labels);
    const std::vector<std::int64_t> again(p.assignments().begin(), p.assignments().end());
    const LatentPartition q = PartitionFromLabels(again);
    ASSERT_EQ(q.class_members(), p.class_members());
  }
}

RowMatrixXd TwoClouds(std::mt19937_64& rng, std::vector<std::size_t>& truth) {
  RowMatrixXd pts(100, 2);
  truth.clear();
  for (Eigen::Index i = 0; i < 100; ++i) {
    const double cx = i % 2 == 0 ? 10.0 : -10.0;
    pts(i, 0) = cx + StandardNormal(rng);
    pts(i, 1) = StandardNormal(rng);
    truth.push_back(static_cast<std::size_t>(i % 2));
  }
  return pts;
}

TEST(KMeansTest, SeparatesTwoClouds) {
  std::mt19937_64 rng(9);
  std::vector<std::size_t> truth;
  const RowMatrixXd pts = TwoClouds(rng, truth);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const KMeansResult km = KMeans(pts, {2, seed, 100, 1e-4, 1});
    // Each cluster must be exactly one cloud.
    for (std::size_t i = 0; i < 100; ++i) {
      ASSERT_EQ(km.assignments[i] == km.assignments[0], truth[i] == truth[0]) << "seed " << seed;
    }
    // Oracle: every point is nearer its own cloud's mean than the other's.
    Eigen::RowVector2d mean[2] = {Eigen::RowVector2d::Zero(), Eigen::RowVector2d::Zero()};
    for (std::size_t i = 0; i < 100; ++i) mean[truth[i]] += pts.row(static_cast<Eigen::Index>(i));
    mean[0] /= 50.0;
    mean[1] /= 50.0;
    for (std::size_t i = 0; i < 100; ++i) {
      const auto p = pts.row(static_cast<Eigen::Index>(i));
      ASSERT_LT((p - mean[truth[i]]).squaredNorm(), (p - mean[1 - truth[i]]).squaredNorm());
    }
  }
}

TEST(KMeansTest, SingleCluster) {
  const auto data = testing::GaussianMixture(3, 10, 4, 2, 1);
  const LatentPartition p = KMeansPartition(data.embeddings, {1, 0, 100, 1e-4, 1});
  EXPECT_EQ(p.k(), 1u);
  EXPECT_EQ(p.members(0).size(), 30u);
}

TEST(KMeansTest, KEqualsNGivesSingletons) {
  const auto data = testing::GaussianMixture(2, 6, 3, 1, 2);
  const LatentPartition p = KMeansPartition(data.embeddings, {12, 3, 100, 1e-4, 1});
  EXPECT_EQ(p.k(), 12u);
  for (std::size_t c = 0; c < p.k(); ++c) EXPECT_EQ(p.members(c).size(), 1u);
}

TEST(KMeansTest, RejectsOutOfRangeK) {
  const auto data = testing::GaussianMixture(1, 5, 3, 1, 2);
  EXPECT_THROW(KMeansPartition(data.embeddings, {0, 0, 10, 1e-4, 1}), ValidationError);
  EXPECT_THROW(KMeansPartition(data.embeddings, {6, 0, 10, 1e-4, 1}), ValidationError);
}

TEST(KMeansTest, DuplicatePointsDoNotBreakSeeding) {
  RowMatrixXd pts = RowMatrixXd::Zero(6, 2);
  pts(5, 0) = 1.0;
  const KMeansResult km = KMeans(pts, {4, 1, 20, 1e-4, 1});
  EXPECT_EQ(km.assignments.size(), 6u);
  std::set<std::size_t> used(km.assignments.begin(), km.assignments.end());
  EXPECT_GE(used.size(), 2u);
}

class KMeansPropertyTest : public ::testing::TestWithParam<int> {};

TEST_P(KMeansPropertyTest, DeterministicMonotoneAndThreadIndependent) {
  const auto seed = static_cast<std::uint64_t>(GetParam());
  const auto data = testing::GaussianMixture(6, 30, 8, 2, 50 + seed);
  const RowMatrixXd pts = ClusteringPoints(data.embeddings);
  const KMeansOptions opts{8, seed, 100, 1e-6, 1};
  const KMeansResult a = KMeans(pts, opts);
  const KMeansResult b = KMeans(pts, opts);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_TRUE(a.centroids == b.centroids);
  ASSERT_FALSE(a.objective_history.empty());
  for (std::size_t t = 1; t < a.objective_history.size(); ++t) {
    EXPECT_LE(a.objective_history[t], a.objective_history[t - 1] * (1 + 1e-12))
        << "round " << t;
  }
  KMeansOptions threaded = opts;
  threaded.threads = 4;
  const KMeansResult c = KMeans(pts, threaded);
  EXPECT_EQ(a.assignments, c.assignments);
  EXPECT_TRUE(a.centroids == c.centroids);
  EXPECT_EQ(a.objective_history, c.objective_history);
}

INSTANTIATE_TEST_SUITE_P(Seeds, KMeansPropertyTest, ::testing::Range(0, 8));

TEST(KMeansTest, ConvergesBeforeIterationCap) {
  std::mt19937_64 rng(21);
  std::vector<std::size_t> truth;
  const RowMatrixXd pts = TwoClouds(rng, truth);
  const KMeansResult km = KMeans(pts, {2, 0, 100, 1e-4, 1});
  EXPECT_TRUE(km.converged);
  EXPECT_LT(km.iterations, 100u);
}

}  // namespace
}  // namespace sas
