#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "relforge/error.hpp"
#include "relforge/metrics.hpp"

namespace mt = relforge::metrics;

TEST(ConfusionTest, Examples) {
  std::vector<int> gold = {1, 1, 1, 1, 0, 0, 0, 0, 0, 0};
  EXPECT_EQ(mt::confusion(gold, gold), (mt::Confusion{4, 0, 0, 6}));
  EXPECT_EQ(mt::confusion({1, 1, 1, 1, 1}, {0, 0, 0, 0, 0}), (mt::Confusion{0, 5, 0, 0}));
  EXPECT_EQ(mt::confusion({1, 1, 1, 0}, {1, 1, 0, 1}), (mt::Confusion{2, 1, 1, 0}));
}

TEST(ConfusionTest, Errors) {
  EXPECT_THROW(mt::confusion({}, {}), relforge::ValidationError);
  EXPECT_THROW(mt::confusion({1}, {1, 0}), relforge::ValidationError);
  EXPECT_THROW(mt::confusion({2}, {1}), relforge::ValidationError);
  EXPECT_THROW(mt::confusion({1}, {-1}), relforge::ValidationError);
}

TEST(F1Test, Examples) {
  EXPECT_EQ(mt::f1_positive({4, 0, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(mt::f1_positive({2, 1, 1, 0}), 2.0 / 3.0);
  EXPECT_EQ(mt::f1_positive({0, 0, 0, 0}), 0.0);
  EXPECT_EQ(mt::f1_positive({0, 0, 0, 9}), 0.0);
}

TEST(CompetitionScoreTest, Examples) {
  EXPECT_NEAR(mt::competition_score(0.8796, 0.8744), 0.8770, 1e-12);
  EXPECT_EQ(mt::competition_score(1.0, 1.0), 1.0);
  EXPECT_EQ(mt::competition_score(0.0, 1.0), 0.5);
  EXPECT_THROW(mt::competition_score(1.1, 0.5), relforge::ValidationError);
}

TEST(F1PropertyTest, HarmonicMeanPermutationAndNegatives) {
  std::mt19937_64 rng(9);
  for (int iter = 0; iter < 500; ++iter) {
    const std::size_t n = 1 + rng() % 60;
    std::vector<int> pred(n), gold(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = static_cast<int>(rng() % 2);
      gold[i] = static_cast<int>(rng() % 2);
    }
    const auto c = mt::confusion(pred, gold);
    ASSERT_EQ(c.total(), n);
    const double f1 = mt::f1_positive(c);
    if (c.tp > 0) {
      const double p = double(c.tp) / double(c.tp + c.fp);
      const double r = double(c.tp) / double(c.tp + c.fn);
      ASSERT_NEAR(f1, 2 * p * r / (p + r), 1e-12);
    } else {
      ASSERT_EQ(f1, 0.0);
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> p2, g2;
    for (auto i : order) p2.push_back(pred[i]), g2.push_back(gold[i]);
    ASSERT_EQ(mt::f1_positive(mt::confusion(p2, g2)), f1);
    p2.push_back(0), g2.push_back(0);
    ASSERT_EQ(mt::f1_positive(mt::confusion(p2, g2)), f1);
  }
}

TEST(ReportTest, JsonShapeAndLanguageBreakdown) {
  const auto r = mt::evaluate({1, 0, 1, 1}, {1, 0, 0, 1}, {"ko", "ko", "ja", "ja"});
  EXPECT_EQ(r.overall, (mt::Confusion{2, 1, 0, 1}));
  EXPECT_EQ(r.by_language.at("ko"), (mt::Confusion{1, 0, 0, 1}));
  EXPECT_EQ(r.by_language.at("ja"), (mt::Confusion{1, 1, 0, 0}));
  const auto j = mt::to_json(r);
  EXPECT_DOUBLE_EQ(j["precision"].get<double>(), 2.0 / 3.0);
  EXPECT_EQ(j["recall"].get<double>(), 1.0);
  EXPECT_EQ(j["support_pos"].get<int>(), 2);
  EXPECT_EQ(j["support_neg"].get<int>(), 2);
  EXPECT_EQ(j["by_language"]["ko"]["f1_positive"].get<double>(), 1.0);
  EXPECT_FALSE(mt::to_json(mt::evaluate({1}, {1})).contains("by_language"));
}
