#include <gtest/gtest.h>

#include "hetree/error.h"
#include "hetree/params.h"

using namespace hetree;

TEST(Params, LeafBounds) {
  EXPECT_EQ(leaf_bounds(500, {25, 50}), (std::pair<std::size_t, std::size_t>{10, 20}));
  EXPECT_EQ(leaf_bounds(1000, {25, 50}), (std::pair<std::size_t, std::size_t>{20, 40}));
  EXPECT_EQ(leaf_bounds(1, {1, 1}), (std::pair<std::size_t, std::size_t>{1, 1}));
}

TEST(Params, CandidatesFor500) {
  auto c = enumerate_candidates(10, 20, 6);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].leaves, 16u);
  EXPECT_EQ(c[0].degree, 4u);
  EXPECT_EQ(c[0].height, 2);
}

TEST(Params, CandidatesFor1000) {
  auto c = enumerate_candidates(20, 40, 6);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].leaves, 27u);
  EXPECT_EQ(c[0].height, 3);
  EXPECT_EQ(c[1].leaves, 25u);
  EXPECT_EQ(c[1].degree, 5u);
  EXPECT_EQ(c[2].leaves, 36u);
  EXPECT_EQ(c[2].degree, 6u);
}

TEST(Params, OnlyPowerInRange) {
  auto c = enumerate_candidates(80, 82, 6);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].leaves, 81u);
  EXPECT_EQ(c[0].degree, 3u);
  EXPECT_EQ(c[0].height, 4);
}

TEST(Params, Selection) {
  auto c = enumerate_candidates(20, 40, 6);
  EXPECT_EQ(select_setting(c).leaves, 27u);
  std::vector<CandidateSetting> rest(c.begin() + 1, c.end());
  CandidateSetting s2 = select_setting(rest);
  EXPECT_EQ(s2.leaves, 25u);
  EXPECT_DOUBLE_EQ(rest[0].centre_distance, 5);
  EXPECT_DOUBLE_EQ(rest[1].centre_distance, 6);
  EXPECT_EQ(select_setting({c[2]}).leaves, 36u);
  try {
    select_setting({});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoCandidate);
  }
}

TEST(Params, Estimate) {
  TreeParams a = estimate_params(500, {25, 50}, Variant::kC);
  EXPECT_EQ(a.leaves, 16u);
  EXPECT_EQ(a.degree, 4u);
  TreeParams b = estimate_params(1000, {25, 50}, Variant::kR);
  EXPECT_EQ(b.variant, Variant::kR);
  EXPECT_EQ(b.leaves, 27u);
  EXPECT_EQ(b.degree, 3u);
}

TEST(Params, FallbackForSmallData) {
  // lmin = 1, lmax = 3: no perfect tree with d >= 3 and height >= 2 fits.
  EXPECT_TRUE(enumerate_candidates(1, 3, 6).empty());
  TreeParams p = estimate_params(30, {10, 50}, Variant::kC);
  EXPECT_EQ(p.leaves, 1u);
  EXPECT_EQ(p.degree, 3u);
}
