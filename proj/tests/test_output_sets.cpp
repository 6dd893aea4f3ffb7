#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include <binsos/output_sets.hpp>

using namespace binsos;

namespace {

constexpr MaybeBit bot{};
constexpr MaybeBit b0{Bit::zero};
constexpr MaybeBit b1{Bit::one};

}  // namespace

TEST(OutputValue, ComplementIsInvolution) {
  for (auto b : {Bit::zero, Bit::one}) {
    EXPECT_NE(complement(b), b);
    EXPECT_EQ(complement(complement(b)), b);
    EXPECT_EQ(to_int(complement(b)), 1 ^ to_int(b));
  }
}

TEST(OutputSetOp, Examples) {
  EXPECT_EQ(output_set(OutputVector{bot, bot, bot}), OutputSet::empty);
  EXPECT_EQ(output_set(OutputVector{b0, bot, b1}), OutputSet::both);
  EXPECT_EQ(output_set(OutputVector{b1, b1, bot, b1}), OutputSet::one);
  EXPECT_EQ(output_set(OutputVector{}), OutputSet::empty);
}

TEST(OutputSetOp, PermutationInvariant) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    OutputVector v(static_cast<std::size_t>(rng() % 7));
    for (auto& e : v) e = std::array<MaybeBit, 3>{bot, b0, b1}[rng() % 3];
    const auto base = output_set(v);
    for (int k = 0; k < 5; ++k) {
      std::shuffle(v.begin(), v.end(), rng);
      EXPECT_EQ(output_set(v), base);
    }
  }
}

TEST(OutputSetLattice, InclusionOrder) {
  for (auto a : kAllOutputSets) {
    EXPECT_TRUE(is_subset(OutputSet::empty, a));
    EXPECT_TRUE(is_subset(a, OutputSet::both));
    for (auto b : kAllOutputSets) {
      EXPECT_TRUE(is_subset(a, join(a, b)));
      EXPECT_TRUE(is_subset(meet(a, b), a));
      EXPECT_EQ(is_subset(a, b) && is_subset(b, a), a == b);
    }
  }
  EXPECT_FALSE(is_subset(OutputSet::zero, OutputSet::one));
}

TEST(ClassifyLine, Examples) {
  EXPECT_EQ(classify_line({OutputSet::empty, OutputSet::both}), 7);
  EXPECT_EQ(classify_line({OutputSet::zero, OutputSet::one}), 10);
  EXPECT_EQ(classify_line(SetOfOutputSets{}), 16);
  EXPECT_EQ(classify_line({OutputSet::empty, OutputSet::zero, OutputSet::one, OutputSet::both}), 1);
  EXPECT_EQ(classify_line({OutputSet::empty}), 15);
}

TEST(ClassifyLine, Bijection) {
  std::set<int> lines;
  for (unsigned m = 0; m < 16; ++m) lines.insert(classify_line(SetOfOutputSets::from_mask(m)));
  EXPECT_EQ(lines.size(), 16u);
  for (int k = 1; k <= 16; ++k) EXPECT_EQ(classify_line(line_members(k)), k);
  EXPECT_THROW(line_members(0), std::out_of_range);
  EXPECT_THROW(line_members(17), std::out_of_range);
}

TEST(SetOfOutputSets, MaskBounds) {
  EXPECT_THROW(SetOfOutputSets(std::uint8_t{16}), std::invalid_argument);
  EXPECT_EQ(SetOfOutputSets::from_mask(0b1001).members(), (std::vector<OutputSet>{OutputSet::empty, OutputSet::both}));
}

TEST(TightCondition, Examples) {
  EXPECT_TRUE(tight_condition(7, Timing::async)(5, 2));
  EXPECT_FALSE(tight_condition(7, Timing::async)(4, 2));
  EXPECT_FALSE(tight_condition(10, Timing::async)(3, 1));
  for (int n = 0; n <= 12; ++n)
    for (int t = 0; t <= n; ++t) EXPECT_FALSE(tight_condition(16, Timing::sync)(n, t));
}

// Rows of the characterization table, transcribed as (line, async, sync).
TEST(TightCondition, TableRows) {
  struct Row {
    int line;
    const char* async;
    const char* sync;
  };
  const Row rows[] = {
      {1, "n >= t && n >= 2", "n >= t && n >= 2"},
      {2, "n > t && n >= 2", "n > t && n >= 2"},
      {3, "n >= t && n >= 2", "n >= t && n >= 2"},
      {4, "n > t && n >= 2", "n > t && n >= 2"},
      {5, "n >= t && n >= 2", "n >= t && n >= 2"},
      {6, "n > t && n >= 2", "n > t && n >= 2"},
      {7, "2*n > 3*t + 2 && n >= 2", "n >= t + 2 && n >= 2"},
      {8, "2*n > 3*t + 2 && n >= 2", "n >= t + 2 && n >= 2"},
      {9, "n >= t && n >= 1", "n >= t && n >= 1"},
      {10, "t == 0 && n >= 1", "n > t && n >= 1"},
      {11, "n >= t && n >= 1", "n >= t && n >= 1"},
      {12, "n > t && n >= 1", "n > t && n >= 1"},
      {13, "n >= t && n >= 1", "n >= t && n >= 1"},
      {14, "n > t && n >= 1", "n > t && n >= 1"},
      {15, "n >= t && n >= 0", "n >= t && n >= 0"},
      {16, "false", "false"},
  };
  for (const auto& r : rows) {
    EXPECT_EQ(tight_condition(r.line, Timing::async).text(), r.async) << r.line;
    EXPECT_EQ(tight_condition(r.line, Timing::sync).text(), r.sync) << r.line;
  }
}

TEST(TightCondition, IntegerFormMatchesRational) {
  for (int t = 0; t <= 12; ++t)
    for (int n = 0; n <= 40; ++n) EXPECT_EQ(2 * n > 3 * t + 2, n > 1.5 * t + 1) << n << "," << t;
}

TEST(TightCondition, ImpliesCountingBounds) {
  for (int k = 1; k <= 15; ++k) {
    const auto b = observation1_bounds(line_members(k));
    for (auto timing : kTimings)
      for (int n = 0; n <= 12; ++n)
        for (int t = 0; t <= n; ++t)
          if (tight_condition(k, timing)(n, t)) EXPECT_TRUE(satisfies(b, n, t)) << k << " " << n << "," << t;
  }
}

TEST(Observation1, Examples) {
  EXPECT_EQ(observation1_bounds({OutputSet::empty, OutputSet::both}), (CardinalityBounds{2, 0}));
  EXPECT_EQ(observation1_bounds({OutputSet::both}), (CardinalityBounds{2, 2}));
  EXPECT_EQ(observation1_bounds({OutputSet::zero}), (CardinalityBounds{1, 1}));
  EXPECT_THROW(observation1_bounds(SetOfOutputSets{}), std::invalid_argument);
}

TEST(SystemConfig, Validation) {
  EXPECT_NO_THROW((SystemConfig{3, 3, Timing::sync}.validate()));
  EXPECT_THROW((SystemConfig{2, 3, Timing::sync}.validate()), std::invalid_argument);
  EXPECT_THROW((SystemConfig{2, -1, Timing::async}.validate()), std::invalid_argument);
}

TEST(CharacterizationTable, Rendering) {
  const auto j = characterization_table_json();
  ASSERT_EQ(j.size(), 32u);
  for (const auto& row : j) {
    EXPECT_TRUE(row.contains("line"));
    EXPECT_TRUE(row.contains("members_mask"));
    EXPECT_TRUE(row.contains("timing"));
    EXPECT_TRUE(row.contains("condition"));
    EXPECT_EQ(row["members_mask"].get<int>(), 16 - row["line"].get<int>());
  }
}

TEST(ParseMaybeBit, Literals) {
  EXPECT_EQ(parse_maybe_bit("0"), b0);
  EXPECT_EQ(parse_maybe_bit("1"), b1);
  EXPECT_EQ(parse_maybe_bit("bot"), bot);
  EXPECT_THROW(parse_maybe_bit("2"), std::invalid_argument);
}
