#include <algorithm>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "relforge/calibrate.hpp"
#include "relforge/error.hpp"
#include "relforge/metrics.hpp"
#include "support/calib_oracle.hpp"

namespace cb = relforge::calibrate;

namespace {

using relforge::testing::oracle_f1;
using relforge::testing::oracle_grid;
using relforge::testing::oracle_threshold;

}  // namespace

TEST(GridTest, DefaultHas21ExactPoints) {
  const auto pts = cb::ThresholdGrid{}.points();
  ASSERT_EQ(pts, oracle_grid());
  EXPECT_EQ(pts[6], 0.42);
  EXPECT_TRUE(cb::ThresholdGrid{}.contains(0.42));
  EXPECT_FALSE(cb::ThresholdGrid{}.contains(0.43));
  EXPECT_FALSE(cb::ThresholdGrid{}.contains(0.72));
}

TEST(GridTest, Validation) {
  EXPECT_THROW((cb::ThresholdGrid{0.7, 0.3, 0.02}.validate()), relforge::ValidationError);
  EXPECT_THROW((cb::ThresholdGrid{0.3, 0.7, 0.0}.validate()), relforge::ValidationError);
  EXPECT_THROW((cb::ThresholdGrid{0.3, 0.7, 0.03}.validate()), relforge::ValidationError);
  EXPECT_EQ((cb::ThresholdGrid{0.5, 0.5, 0.1}.points()), std::vector<double>{0.5});
}

TEST(DecideTest, InclusiveBoundary) {
  EXPECT_EQ(cb::decide(0.5, 0.5), 1);
  EXPECT_EQ(cb::decide(0.49, 0.5), 0);
  EXPECT_EQ(cb::decide(1.0, 0.3), 1);
}

TEST(GlobalThresholdTest, Examples) {
  EXPECT_EQ(cb::tune_global_threshold({0.2, 0.4, 0.6, 0.8}, {0, 0, 1, 1}), 0.42);
  EXPECT_EQ(cb::tune_global_threshold({0.3, 0.5, 0.9}, {1, 1, 1}), 0.30);
  const auto r = cb::best_threshold({0.3, 0.5, 0.9}, {0, 0, 0});
  EXPECT_EQ(r.threshold, 0.30);
  EXPECT_EQ(r.f1, 0.0);
}

TEST(GlobalThresholdTest, Errors) {
  EXPECT_THROW(cb::tune_global_threshold({}, {}), relforge::ValidationError);
  EXPECT_THROW(cb::tune_global_threshold({0.5}, {1, 0}), relforge::ValidationError);
  EXPECT_THROW(cb::tune_global_threshold({1.5}, {1}), relforge::ValidationError);
  EXPECT_THROW(cb::tune_global_threshold({0.5}, {2}), relforge::ValidationError);
}

TEST(LeafThresholdTest, Examples) {
  std::vector<cb::LeafSample> s = {
      {0.2, 0, "Headphones"}, {0.4, 0, "Headphones"}, {0.6, 1, "Headphones"}, {0.8, 1, "Headphones"}};
  auto t = cb::tune_leaf_thresholds(s, {}, 4);
  EXPECT_EQ(t.leaf_thresholds, (std::map<std::string, double>{{"Headphones", 0.42}}));
  EXPECT_EQ(t.global_threshold, 0.42);

  std::vector<cb::LeafSample> small = {{0.2, 0, "a"}, {0.5, 1, "a"}, {0.9, 1, "a"}};
  EXPECT_TRUE(cb::tune_leaf_thresholds(small, {}, 20).leaf_thresholds.empty());

  std::vector<cb::LeafSample> twin;
  for (const auto& x : s) {
    twin.push_back({x.prob, x.label, "x"});
    twin.push_back({x.prob, x.label, "y"});
  }
  t = cb::tune_leaf_thresholds(twin, {}, 1);
  EXPECT_EQ(t.leaf_thresholds.at("x"), t.leaf_thresholds.at("y"));
  EXPECT_THROW(cb::tune_leaf_thresholds({}, {}, 1), relforge::ValidationError);
  EXPECT_THROW(cb::tune_leaf_thresholds({{0.5, 1, ""}}, {}, 1), relforge::ValidationError);
}

TEST(LeafThresholdTest, OracleEquivalenceDominanceAndDeterminism) {
  std::mt19937_64 rng(2024);
  for (int iter = 0; iter < 50; ++iter) {
    const auto samples = relforge::testing::random_leaf_instance(rng);
    const auto table = cb::tune_leaf_thresholds(samples);

    std::map<std::string, std::pair<std::vector<double>, std::vector<int>>> by_leaf;
    std::vector<double> all_p;
    std::vector<int> all_y;
    for (const auto& s : samples) {
      by_leaf[s.leaf].first.push_back(s.prob);
      by_leaf[s.leaf].second.push_back(s.label);
      all_p.push_back(s.prob);
      all_y.push_back(s.label);
    }
    std::map<std::string, double> expected;
    for (const auto& [leaf, d] : by_leaf) {
      if (d.first.size() >= 20) expected[leaf] = oracle_threshold(d.first, d.second);
    }
    ASSERT_EQ(table.leaf_thresholds, expected) << "instance " << iter;
    ASSERT_EQ(table.global_threshold, oracle_threshold(all_p, all_y));

    // Each tuned leaf does at least as well on its own samples as the
    // global threshold would.
    for (const auto& [leaf, t] : table.leaf_thresholds) {
      const auto& d = by_leaf.at(leaf);
      ASSERT_GE(oracle_f1(d.first, d.second, t),
                oracle_f1(d.first, d.second, table.global_threshold));
    }

    auto shuffled = samples;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    ASSERT_EQ(cb::tune_leaf_thresholds(shuffled, {}, 20, 4), table);

    for (const auto& [leaf, t] : table.leaf_thresholds) ASSERT_TRUE(table.grid.contains(t));
  }
}

// Leaf-wise optimality does not carry over to F1 pooled across leaves: leaf
// "b" has no positives, every threshold ties at F1 = 0 and the smallest one
// admits a false positive the global threshold rejects.
TEST(LeafThresholdTest, PooledF1CanFallBelowGlobal) {
  const std::vector<cb::LeafSample> s = {{0.30, 0, "b"}, {0.64, 0, "a"}, {0.50, 1, "a"}};
  const auto table = cb::tune_leaf_thresholds(s, {}, 1);
  EXPECT_EQ(table.global_threshold, 0.32);
  EXPECT_EQ(table.leaf_thresholds, (std::map<std::string, double>{{"a", 0.30}, {"b", 0.30}}));
  std::vector<cb::Scored> scored;
  std::vector<int> gold, global_pred;
  for (const auto& x : s) {
    scored.push_back({x.prob, x.leaf});
    gold.push_back(x.label);
    global_pred.push_back(cb::decide(x.prob, table.global_threshold));
  }
  namespace mt = relforge::metrics;
  EXPECT_DOUBLE_EQ(mt::f1_positive(mt::confusion(cb::apply_calibration(scored, table), gold)), 0.5);
  EXPECT_DOUBLE_EQ(mt::f1_positive(mt::confusion(global_pred, gold)), 2.0 / 3.0);
}

TEST(ApplyCalibrationTest, Examples) {
  cb::CalibrationTable t;
  t.global_threshold = 0.52;
  t.leaf_thresholds["Headphones"] = 0.42;
  EXPECT_EQ(cb::apply_calibration({{0.5, "Headphones"}, {0.5, "Unseen"}}, t),
            (std::vector<int>{1, 0}));
  t.global_threshold = 0.5;
  EXPECT_EQ(cb::apply_calibration({{0.5, std::nullopt}}, t), std::vector<int>{1});
}

namespace {

// Independent exhaustive search; ties prefer higher w_p, lower threshold,
// higher w_j.
std::tuple<int, int, double, double> hybrid_oracle(const std::vector<cb::HybridSample>& v) {
  std::tuple<int, int, double, double> best{-1, -1, 0, -1};
  for (int a = 0; a <= 20; ++a) {
    for (int b = 0; a + b <= 20; ++b) {
      const double wp = a / 20.0, wj = b / 20.0, wc = (20 - a - b) / 20.0;
      std::vector<double> s;
      std::vector<int> y;
      for (const auto& x : v) {
        s.push_back(std::clamp(wp * x.p_model + wj * x.jaccard + wc * x.containment, 0.0, 1.0));
        y.push_back(x.label);
      }
      const double t = oracle_threshold(s, y);
      const double f = oracle_f1(s, y, t);
      auto& [ba, bb, bt, bf] = best;
      const bool take = f > bf || (f == bf && (a > ba || (a == ba && (t < bt || (t == bt && b > bb)))));
      if (take) best = {a, b, t, f};
    }
  }
  return best;
}

}  // namespace

TEST(HybridWeightsSearchTest, ModelSignalOnly) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<cb::HybridSample> v;
  for (int i = 0; i < 200; ++i) {
    const double p = u(rng);
    v.push_back({p, u(rng), u(rng), p >= 0.5 ? 1 : 0});
  }
  const auto r = cb::tune_hybrid_weights(v);
  EXPECT_EQ(r.f1, 1.0);
  EXPECT_EQ(r.weights, (relforge::lexical::HybridWeights{1, 0, 0}));
}

TEST(HybridWeightsSearchTest, JaccardSignalBeatsNoise) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<cb::HybridSample> v;
  for (int i = 0; i < 300; ++i) {
    const double j = u(rng);
    v.push_back({u(rng), j, u(rng), j >= 0.5 ? 1 : 0});
  }
  const auto r = cb::tune_hybrid_weights(v);
  EXPECT_GT(r.weights.w_j, r.weights.w_p);
}

TEST(HybridWeightsSearchTest, SingleSampleTieBreak) {
  const auto r = cb::tune_hybrid_weights({{1.0, 1.0, 1.0, 1}});
  EXPECT_EQ(r.f1, 1.0);
  EXPECT_EQ(r.weights, (relforge::lexical::HybridWeights{1, 0, 0}));
  EXPECT_EQ(r.threshold, 0.30);
  EXPECT_THROW(cb::tune_hybrid_weights({}), relforge::ValidationError);
  EXPECT_THROW(cb::tune_hybrid_weights({{0.5, 0.5, 0.5, 1}}, {}, 0.3), relforge::ValidationError);
}

TEST(HybridWeightsSearchTest, MatchesBruteForceOracle) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0, 1);
  for (int iter = 0; iter < 20; ++iter) {
    std::vector<cb::HybridSample> v;
    const int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      const double p = u(rng), j = u(rng) * 0.5, c = u(rng);
      v.push_back({p, j, c, (p + c) / 2 + 0.2 * (u(rng) - 0.5) > 0.5 ? 1 : 0});
    }
    const auto r = cb::tune_hybrid_weights(v);
    const auto [a, b, t, f] = hybrid_oracle(v);
    ASSERT_EQ(r.weights.w_p, a / 20.0) << iter;
    ASSERT_EQ(r.weights.w_j, b / 20.0) << iter;
    ASSERT_EQ(r.threshold, t) << iter;
    ASSERT_EQ(r.f1, f) << iter;
  }
}

TEST(CalibrationTableTest, JsonRoundTripAndValidation) {
  cb::CalibrationTable t;
  t.global_threshold = 0.42;
  t.leaf_thresholds = {{"Headphones", 0.5}, {"Cases", 0.3}};
  t.hybrid_weights = {0.5, 0.25, 0.25};
  const auto j = t.to_json();
  EXPECT_EQ(j.dump(),
            R"({"grid":{"lo":0.3,"hi":0.7,"step":0.02},"global_threshold":0.42,)"
            R"("min_leaf_support":20,"leaf_thresholds":{"Cases":0.3,"Headphones":0.5},)"
            R"("hybrid_weights":{"w_p":0.5,"w_j":0.25,"w_c":0.25}})");
  EXPECT_EQ(cb::CalibrationTable::from_json(nlohmann::json::parse(j.dump())), t);

  auto bad = nlohmann::json::parse(j.dump());
  bad["global_threshold"] = 0.43;
  EXPECT_THROW(cb::CalibrationTable::from_json(bad), relforge::ValidationError);
  bad = nlohmann::json::parse(j.dump());
  bad["leaf_thresholds"][""] = 0.5;
  EXPECT_THROW(cb::CalibrationTable::from_json(bad), relforge::ValidationError);
  EXPECT_THROW(cb::CalibrationTable::from_json(nlohmann::json::object()), relforge::DataError);
}
