#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "rfhw/errors.hpp"
#include "rfhw/majority_vote.hpp"

namespace rfhw {
namespace {

using testing::ceil_log2_loop;
using testing::expected_iterative_latency;
using testing::floor_log2_loop;
using testing::histogram;
using testing::histogram_argmax;
using testing::random_votes;
using testing::votes_with_winner;

TEST(VoteVector, RejectsDegenerateSizes) {
  EXPECT_THROW(VoteVector({0}, 2), std::invalid_argument);
  EXPECT_THROW(VoteVector({0, 0}, 1), std::invalid_argument);
  EXPECT_THROW(VoteVector({0, 2}, 2), std::invalid_argument);
  EXPECT_NO_THROW(VoteVector({0, 1}, 2));
}

TEST(OneHot, SingleRow) {
  const auto m = decode_one_hot(VoteVector({2, 2}, 4));
  for (std::uint32_t c = 0; c < 4; ++c) EXPECT_EQ(m.at(0, c), c == 2);
}

TEST(OneHot, TwoIdenticalRows) {
  const auto m = decode_one_hot(VoteVector({0, 0}, 2));
  EXPECT_TRUE(m.at(0, 0));
  EXPECT_FALSE(m.at(0, 1));
  EXPECT_TRUE(m.at(1, 0));
  EXPECT_FALSE(m.at(1, 1));
}

TEST(OneHot, ColumnSums) {
  const auto m = decode_one_hot(VoteVector({1, 0, 1, 1, 2}, 3));
  EXPECT_EQ(m.column_sum(0), 1u);
  EXPECT_EQ(m.column_sum(1), 3u);
  EXPECT_EQ(m.column_sum(2), 1u);
  for (std::uint32_t r = 0; r < m.rows(); ++r) {
    int ones = 0;
    for (std::uint32_t c = 0; c < m.cols(); ++c) ones += m.at(r, c);
    EXPECT_EQ(ones, 1);
  }
}

TEST(AdderTreePlan, StageShapes) {
  const auto plan = AdderTreePlan::for_inputs(40);
  ASSERT_EQ(plan.depth(), 6u);
  EXPECT_EQ(plan.count_width(), 6u);
  const std::uint32_t expect_adders[] = {20, 10, 5, 3, 2, 1};
  for (std::uint32_t s = 0; s < plan.depth(); ++s) {
    EXPECT_EQ(plan.stages()[s].adders, expect_adders[s]) << s;
    EXPECT_EQ(plan.stages()[s].input_width, s + 1);
    EXPECT_EQ(plan.stages()[s].output_width, s + 2);
  }
  EXPECT_EQ(AdderTreePlan::for_inputs(8).count_width(), 4u);
  EXPECT_EQ(AdderTreePlan::for_inputs(7).count_width(), 3u);
}

TEST(ClassCounts, Example) {
  const auto r = compute_class_counts(decode_one_hot(VoteVector({1, 0, 1, 1, 2}, 3)),
                                      AdderTreePlan::for_inputs(5));
  EXPECT_EQ(r.latency, 3u);
  EXPECT_EQ(r.counts.value(0), 1);
  EXPECT_EQ(r.counts.value(1), 3);
  EXPECT_EQ(r.counts.value(2), 1);
}

TEST(ClassCounts, UnanimousFortyFitsSixBits) {
  const auto r = compute_class_counts(decode_one_hot(VoteVector(std::vector<ClassLabel>(40, 0), 10)),
                                      AdderTreePlan::for_inputs(40));
  EXPECT_EQ(r.latency, 6u);
  EXPECT_EQ(r.counts.magnitude_width(), 6u);
  EXPECT_EQ(r.counts.value(0), 40);
  for (std::uint32_t j = 1; j < 10; ++j) EXPECT_EQ(r.counts.value(j), 0);
}

TEST(ClassCounts, LargeRandomMatchesHistogram) {
  std::mt19937_64 rng(11);
  const auto v = random_votes(rng, 512, 500);
  const auto r = compute_class_counts(decode_one_hot(VoteVector(v, 500)),
                                      AdderTreePlan::for_inputs(512));
  const auto h = histogram(v, 500);
  for (std::uint32_t j = 0; j < 500; ++j) EXPECT_EQ(r.counts.value(j), h[j]);
}

TEST(ClassCounts, WidthAuditEveryStage) {
  std::mt19937_64 rng(3);
  for (std::uint32_t t : {2u, 3u, 7u, 8u, 16u, 33u, 64u, 100u, 255u, 256u}) {
    const VoteVector unanimous(std::vector<ClassLabel>(t, 1), 3);
    for (const VoteVector& vv : {unanimous, VoteVector(random_votes(rng, t, 3), 3)}) {
      const auto r = compute_class_counts(decode_one_hot(vv), AdderTreePlan::for_inputs(t));
      for (std::size_t s = 1; s < r.levels.size(); ++s) {
        EXPECT_EQ(r.levels[s].width, s + 1);
        for (auto x : r.levels[s].values) EXPECT_LT(x, 1u << (s + 1));
      }
      for (std::uint32_t j = 0; j < 3; ++j) {
        EXPECT_FALSE(r.counts.sign(j));
        EXPECT_LT(r.counts.magnitude(j), 1u << ceil_log2_loop(t + 1));
      }
    }
  }
}

TEST(ClassCounts, SubtractBelowRangeOverflows) {
  auto c = ClassCounts::from_magnitudes(std::vector<std::uint32_t>{1}, 2);
  c.subtract(0, 3);
  EXPECT_EQ(c.value(0), -2);
  EXPECT_TRUE(c.sign(0));
  EXPECT_THROW(c.subtract(0, 3), WidthOverflow);
}

TEST(AddStage, OverflowDetected) {
  AdderLevel in;
  in.operands = 2;
  in.width = 1;
  in.values = {3, 1};  // 3 does not fit a 1-bit operand; sum 4 overflows 2 bits
  AdderStage st{2, 1, 1, 2};
  EXPECT_THROW(add_stage(in, st, 1), WidthOverflow);
}

TEST(LeadingOne, Examples) {
  EXPECT_EQ(leading_one(0b0110), 4u);
  EXPECT_EQ(leading_one(0b0001), 1u);
  EXPECT_FALSE(leading_one(0).has_value());
  EXPECT_EQ(leading_one(0x80000000u), 0x80000000u);
}

TEST(Subtraction, HandSteppedThreeClasses) {
  auto c = ClassCounts::from_magnitudes(std::vector<std::uint32_t>{1, 2, 1}, 3);
  auto a = subtraction_cycle(c);
  EXPECT_EQ(a.or_word, 3u);
  EXPECT_EQ(a.lod, 2u);
  EXPECT_EQ(a.encoder, 2u);
  EXPECT_EQ(c.value(0), -1);
  EXPECT_EQ(c.value(1), 0);
  EXPECT_EQ(c.value(2), -1);
  EXPECT_FALSE(a.all_negative_after);
  auto b = subtraction_cycle(c);
  EXPECT_EQ(b.or_word, 0u);
  EXPECT_FALSE(b.lod.has_value());
  EXPECT_EQ(b.encoder, 1u);
  EXPECT_TRUE(b.all_negative_after);

  const auto r = run_iterative(VoteVector({1, 1, 2, 0}, 3));
  EXPECT_EQ(r.label, 1u);
  EXPECT_EQ(r.latency, 2u + 1 + 2);
}

TEST(Subtraction, TwoWayTieGoesHigh) {
  auto c = ClassCounts::from_magnitudes(std::vector<std::uint32_t>{1, 1}, 2);
  auto a = subtraction_cycle(c);
  EXPECT_EQ(a.lod, 1u);
  EXPECT_EQ(c.value(0), 0);
  EXPECT_EQ(c.value(1), 0);
  auto b = subtraction_cycle(c);
  EXPECT_FALSE(b.lod.has_value());
  EXPECT_TRUE(b.all_negative_after);
  EXPECT_EQ(b.encoder, 1u);
  EXPECT_EQ(run_iterative(VoteVector({0, 1}, 2)).label, 1u);
}

TEST(StepIterative, ContractViolations) {
  EXPECT_THROW(step_iterative(IterMajorityState{}), ContractViolation);
  auto s = start_iterative(VoteVector({0, 1, 1}, 2));
  while (s.phase != IterPhase::done) s = step_iterative(s);
  EXPECT_TRUE(s.output_valid);
  EXPECT_EQ(s.output, 1u);
  EXPECT_THROW(step_iterative(s), ContractViolation);
}

TEST(RunIterative, LatencyEndpointsAtForty) {
  std::mt19937_64 rng(5);
  const auto best = run_iterative(VoteVector(votes_with_winner(rng, 40, 10, 4, 32), 10));
  EXPECT_EQ(best.label, 4u);
  EXPECT_EQ(best.latency, 9u);
  EXPECT_EQ(best.latency, n_iter_min(40));
  const auto worst = run_iterative(VoteVector(votes_with_winner(rng, 40, 10, 7, 31), 10));
  EXPECT_EQ(worst.label, 7u);
  EXPECT_EQ(worst.latency, 13u);
  EXPECT_EQ(worst.latency, n_iter_max(40));
}

TEST(RunIterative, UnanimousEight) {
  const auto r = run_iterative(VoteVector(std::vector<ClassLabel>(8, 3), 10));
  EXPECT_EQ(r.label, 3u);
  EXPECT_EQ(r.latency, 6u);
}

TEST(RunIterative, GoldenTrace) {
  std::vector<std::string> rows;
  const MajorityTraceSink sink = [&](const MajorityTraceRow& r) {
    rows.push_back(format_trace_row(r));
  };
  const auto r = run_iterative(VoteVector({1, 1, 2, 0}, 3), &sink);
  const std::vector<std::string> golden = {
      "cycle=1 phase=adding[0] signs=- or=- lod=- out=-",
      "cycle=2 phase=adding[1] signs=- or=- lod=- out=-",
      "cycle=3 phase=latch signs=000 or=- lod=- out=-",
      "cycle=4 phase=subtract signs=000 or=3 lod=2 out=-",
      "cycle=5 phase=subtract signs=101 or=0 lod=zero out=1",
  };
  EXPECT_EQ(rows, golden);
  EXPECT_EQ(r.latency, 5u);
}

TEST(Oracle, Examples) {
  EXPECT_EQ(oracle_majority(VoteVector({0, 1, 1, 2}, 3)), 1u);
  EXPECT_EQ(oracle_majority(VoteVector({0, 1}, 2)), 1u);
  EXPECT_EQ(oracle_majority(VoteVector({4, 4, 2, 2, 2}, 5)), 2u);
}

TEST(Formulas, Examples) {
  EXPECT_EQ(n_iter_min(40), 9u);
  EXPECT_EQ(n_iter_max(40), 13u);
  EXPECT_EQ(n_pipe(40), 12u);
  EXPECT_EQ(issue_interval(40), 7u);
  EXPECT_EQ(n_iter_min(4), 5u);
  EXPECT_EQ(n_pipe(2), 3u);
  EXPECT_THROW(n_iter_min(1), std::invalid_argument);
  EXPECT_THROW(n_pipe(0), std::invalid_argument);
}

TEST(Formulas, AgainstLoops) {
  for (std::uint32_t t = 2; t <= 1024; ++t) {
    const auto c = ceil_log2_loop(t), f = floor_log2_loop(t);
    EXPECT_EQ(n_iter_min(t), c + 3u);
    EXPECT_EQ(n_iter_max(t), c + f + 2u);
    EXPECT_EQ(n_pipe(t), c + f + 1u);
    EXPECT_EQ(issue_interval(t), c + 1u);
    EXPECT_EQ(worst_iterative_latency(t), c + 2u + floor_log2_loop(t + 1));
    EXPECT_EQ(exceeds_iter_max_bound(t), ((t + 1) & t) == 0) << t;
  }
}

TEST(Properties, OracleEquivalenceSampled) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::uint32_t> tdist(2, 512), kdist(2, 500);
  for (int i = 0; i < 500; ++i) {
    const auto t = tdist(rng), k = kdist(rng);
    const auto v = random_votes(rng, t, k);
    const VoteVector vv(v, k);
    const auto r = run_iterative(vv);
    EXPECT_EQ(r.label, histogram_argmax(v, k));
    EXPECT_EQ(oracle_majority(vv), histogram_argmax(v, k));
    EXPECT_EQ(r.latency, expected_iterative_latency(v, k));
  }
}

TEST(Properties, ExactLatencyLawSmallExhaustive) {
  for (std::uint32_t t = 2; t <= 6; ++t) {
    for (std::uint32_t k = 2; k <= 3; ++k) {
      std::vector<ClassLabel> v(t, 0);
      for (;;) {
        const auto r = run_iterative(VoteVector(v, k));
        ASSERT_EQ(r.label, histogram_argmax(v, k));
        ASSERT_EQ(r.latency, expected_iterative_latency(v, k));
        ASSERT_GE(r.latency, n_iter_min(t));
        std::size_t i = 0;
        while (i < t && ++v[i] == k) v[i++] = 0;
        if (i == t) break;
      }
    }
  }
}

TEST(Properties, LatencyWindowWhenPopcountBounded) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 300; ++i) {
    const std::uint32_t t = 2 + static_cast<std::uint32_t>(rng() % 200);
    const auto v = random_votes(rng, t, 2 + static_cast<std::uint32_t>(rng() % 6));
    const auto k = *std::max_element(v.begin(), v.end()) + 1;
    const auto kk = std::max<std::uint32_t>(k, 2);
    const auto r = run_iterative(VoteVector(v, kk));
    EXPECT_GE(r.latency, n_iter_min(t));
    if (testing::popcount_loop(testing::max_count(v, kk)) <= floor_log2_loop(t)) {
      EXPECT_LE(r.latency, n_iter_max(t));
    }
  }
}

TEST(Properties, PermutationInvariance) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    const std::uint32_t t = 2 + static_cast<std::uint32_t>(rng() % 60);
    const std::uint32_t k = 2 + static_cast<std::uint32_t>(rng() % 8);
    auto v = random_votes(rng, t, k);
    const auto base = run_iterative(VoteVector(v, k));
    std::shuffle(v.begin(), v.end(), rng);
    const auto perm = run_iterative(VoteVector(v, k));
    EXPECT_EQ(base.label, perm.label);
    EXPECT_EQ(base.latency, perm.latency);
  }
}

TEST(Properties, AllOnesTreeCountExceedsFormula) {
  for (std::uint32_t t : {3u, 7u, 15u, 31u, 63u}) {
    const auto r = run_iterative(VoteVector(std::vector<ClassLabel>(t, 1), 2));
    EXPECT_EQ(r.latency, n_iter_max(t) + 1) << t;
    EXPECT_EQ(r.latency, worst_iterative_latency(t));
  }
}

}  // namespace
}  // namespace rfhw
