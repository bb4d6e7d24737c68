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
#include <limits>
#include <numeric>
#include <random>

#include "gtest/gtest.h"
#include "test_support.h"

namespace sas {
namespace {

using testing::BruteDistance;
using testing::BruteSimilarity;

std::vector<std::size_t> AllOf(const EmbeddingSet& e) {
  std::vector<std::size_t> v(e.n());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// A views {(1,0),(0,1)}, B views {(1,0),(1,0)}.
EmbeddingSet TwoViewPair() { return EmbeddingSet(2, 2, 2, {1, 0, 0, 1, 1, 0, 1, 0}); }

TEST(DistanceTest, IdenticalSingleViewsAreZero) {
  EmbeddingSet e(2, 1, 3, {0.3f, 0.4f, 0.5f, 0.3f, 0.4f, 0.5f});
  const auto m = AllOf(e);
  const Eigen::MatrixXd d = ExpectedAugmentationDistance(e, m);
  EXPECT_EQ(d(0, 1), 0.0);
}

TEST(DistanceTest, TwoViewExampleAveragesAllFourPairs) {
  const EmbeddingSet e = TwoViewPair();
  const auto m = AllOf(e);
  const Eigen::MatrixXd d = ExpectedAugmentationDistance(e, m);
  // 0, 0, sqrt2, sqrt2 over 4 pairs.
  EXPECT_NEAR(d(0, 1), std::sqrt(2.0) / 2.0, 1e-12);
  EXPECT_NEAR(d(1, 0), std::sqrt(2.0) / 2.0, 1e-12);
  // Own views: pairs (0,0),(0,1),(1,0),(1,1) give 0, sqrt2, sqrt2, 0.
  EXPECT_NEAR(d(0, 0), std::sqrt(2.0) / 2.0, 1e-12);
  EXPECT_EQ(d(1, 1), 0.0);
}

TEST(DistanceTest, SingleViewIsPlainL2) {
  EmbeddingSet e(3, 1, 2, {0, 0, 3, 4, -1, 0});
  const std::vector<std::size_t> m = {0, 1, 2};
  const Eigen::MatrixXd d = ExpectedAugmentationDistance(e, m);
  EXPECT_DOUBLE_EQ(d(0, 1), 5.0);
  EXPECT_DOUBLE_EQ(d(0, 2), 1.0);
  EXPECT_NEAR(d(1, 2), std::sqrt(32.0), 1e-12);
}

TEST(DistanceTest, MatchesBruteForceOnSubsetOfMembers) {
  const auto data = testing::GaussianMixture(2, 12, 5, 3, 11);
  const std::vector<std::size_t> members = {1, 4, 7, 13, 20, 22};
  const Eigen::MatrixXd d = ExpectedAugmentationDistance(data.embeddings, members);
  for (std::size_t a = 0; a < members.size(); ++a) {
    for (std::size_t b = 0; b < members.size(); ++b) {
      EXPECT_NEAR(d(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)),
                  BruteDistance(data.embeddings, members[a], members[b]), 1e-12);
    }
  }
}

TEST(SimilarityTest, IdenticalUnitViewsGiveOne) {
  EmbeddingSet e(3, 1, 2, {0.6f, 0.8f, 0.6f, 0.8f, 0.6f, 0.8f});
  const auto m = AllOf(e);
  const SimilarityMatrix s = ExpectedAugmentationSimilarity(e, m, 0.0);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      if (i == j) {
        EXPECT_EQ(s.s(i, j), 0.0);
      } else {
        EXPECT_NEAR(s.s(i, j), 1.0, 1e-7);
      }
    }
  }
}

TEST(SimilarityTest, TwoViewExample) {
  const EmbeddingSet e = TwoViewPair();
  const auto m = AllOf(e);
  const SimilarityMatrix s = ExpectedAugmentationSimilarity(e, m, 0.0);
  EXPECT_DOUBLE_EQ(s.s(0, 1), 0.5);  // (1 + 1 + 0 + 0) / 4
  EXPECT_DOUBLE_EQ(s.s(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(BruteSimilarity(e, 0, 1), 0.5);
  // 0.5 is not strictly above a 0.5 threshold.
  EXPECT_EQ(ExpectedAugmentationSimilarity(e, m, 0.5).s(0, 1), 0.0);
}

TEST(SimilarityTest, NegativeValuesClampToZero) {
  EmbeddingSet e(2, 1, 2, {1, 0, -1, 0.1f});
  const auto m = AllOf(e);
  const SimilarityMatrix s = ExpectedAugmentationSimilarity(e, m, 0.0);
  EXPECT_EQ(s.s(0, 1), 0.0);
  EXPECT_LT(RawAugmentationSimilarity(e, m)(0, 1), 0.0);
}

TEST(SimilarityTest, LocalIndexMapFollowsMembers) {
  const auto data = testing::GaussianMixture(1, 10, 4, 1, 2);
  const std::vector<std::size_t> members = {9, 2, 5};
  const SimilarityMatrix s = ExpectedAugmentationSimilarity(data.embeddings, members, -1.0);
  EXPECT_EQ(s.local_to_global, members);
  EXPECT_EQ(s.size(), 3u);
  EXPECT_NEAR(s.s(0, 1), BruteSimilarity(data.embeddings, 9, 2), 1e-7);
}

class SimilarityPropertyTest : public ::testing::TestWithParam<int> {};

TEST_P(SimilarityPropertyTest, SymmetryThresholdMonotonicityAndBruteForce) {
  const auto data = testing::GaussianMixture(3, 15, 6, 1 + GetParam() % 3,
                                             static_cast<std::uint64_t>(GetParam()));
  const auto m = AllOf(data.embeddings);
  const Eigen::MatrixXd raw = RawAugmentationSimilarity(data.embeddings, m);
  Eigen::MatrixXd previous = ApplyThreshold(raw, -2.0);
  for (double tau : {-1.0, 0.0, 0.25, 0.5, 0.9, std::numeric_limits<double>::infinity()}) {
    const Eigen::MatrixXd s = ApplyThreshold(raw, tau);
    ASSERT_TRUE((s.array() <= previous.array()).all()) << "tau " << tau;
    ASSERT_TRUE((s.array() >= 0.0).all());
    ASSERT_TRUE(s == s.transpose());
    ASSERT_TRUE((s.diagonal().array() == 0.0).all());
    previous = s;
  }
  EXPECT_TRUE(previous.isZero(0.0));
  for (std::size_t i = 0; i < data.embeddings.n(); i += 7) {
    for (std::size_t j = 0; j < data.embeddings.n(); j += 5) {
      ASSERT_NEAR(raw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
                  BruteSimilarity(data.embeddings, i, j), 1e-9);
    }
  }
}

// For unit vectors and one view, <a,b> = 1 - |a-b|^2 / 2.
TEST_P(SimilarityPropertyTest, LawOfCosinesOnUnitSphere) {
  const auto data = testing::GaussianMixture(2, 20, 8, 1, 100 + GetParam());
  const auto m = AllOf(data.embeddings);
  const Eigen::MatrixXd raw = RawAugmentationSimilarity(data.embeddings, m);
  const Eigen::MatrixXd d = ExpectedAugmentationDistance(data.embeddings, m);
  const Eigen::MatrixXd expected = (1.0 - d.array().square() / 2.0).matrix();
  EXPECT_LE((raw - expected).cwiseAbs().maxCoeff(), 1e-5);
}

TEST_P(SimilarityPropertyTest, ThreadCountDoesNotChangeBits) {
  const auto data = testing::GaussianMixture(2, 40, 16, 2, 200 + GetParam());
  const auto m = AllOf(data.embeddings);
  const Eigen::MatrixXd s1 = ExpectedAugmentationSimilarity(data.embeddings, m, 0.0, {1}).s;
  const Eigen::MatrixXd d1 = ExpectedAugmentationDistance(data.embeddings, m, {1});
  for (std::size_t threads : {2u, 3u, 8u}) {
    const SimilarityOptions opts{threads};
    EXPECT_TRUE(ExpectedAugmentationSimilarity(data.embeddings, m, 0.0, opts).s == s1);
    EXPECT_TRUE(ExpectedAugmentationDistance(data.embeddings, m, opts) == d1);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, SimilarityPropertyTest, ::testing::Range(0, 6));

TEST(SimilarityTest, MemoryCapAborts) {
  const auto data = testing::GaussianMixture(1, 10, 2, 1, 3);
  const auto m = AllOf(data.embeddings);
  SimilarityOptions opts;
  opts.max_matrix_bytes = 10 * 10 * sizeof(double) - 1;
  EXPECT_THROW(ExpectedAugmentationSimilarity(data.embeddings, m, 0.0, opts), ValidationError);
  opts.max_matrix_bytes = 10 * 10 * sizeof(double);
  EXPECT_NO_THROW(ExpectedAugmentationSimilarity(data.embeddings, m, 0.0, opts));
}

TEST(SimilarityTest, EmptyClassRejected) {
  const EmbeddingSet e = TwoViewPair();
  EXPECT_THROW(ExpectedAugmentationSimilarity(e, {}, 0.0), ValidationError);
  EXPECT_THROW(ExpectedAugmentationDistance(e, {}), ValidationError);
}

}  // namespace
}  // namespace sas
