#pragma once

// Decision-threshold search (global and per leaf category) and hybrid weight
// search, all maximizing positive-class F1 on a validation set.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "relforge/lexical.hpp"

namespace relforge::calibrate {

struct ThresholdGrid {
  double lo = 0.30;
  double hi = 0.70;
  double step = 0.02;

  // Throws ValidationError unless lo <= hi, step > 0 and (hi - lo) / step is
  // an integer within 1e-9.
  void validate() const;
  // Grid points, ascending, each rounded to 9 decimals (so 0.30 + 6 * 0.02
  // is exactly the double 0.42).
  std::vector<double> points() const;
  bool contains(double t) const;

  bool operator==(const ThresholdGrid&) const = default;
};

inline constexpr std::size_t kDefaultMinLeafSupport = 20;

struct CalibrationTable {
  double global_threshold = 0.5;
  std::map<std::string, double> leaf_thresholds;
  std::size_t min_leaf_support = kDefaultMinLeafSupport;
  lexical::HybridWeights hybrid_weights;
  ThresholdGrid grid;

  double threshold_for(const std::optional<std::string>& leaf) const;
  void validate() const;

  nlohmann::ordered_json to_json() const;
  static CalibrationTable from_json(const nlohmann::json& j);

  bool operator==(const CalibrationTable&) const = default;
};

// prob >= threshold.
int decide(double prob, double threshold);

struct ThresholdResult {
  double threshold = 0.0;
  double f1 = 0.0;
};

// Grid point with the highest F1, smallest threshold on ties. Throws
// ValidationError on empty or mismatched input.
ThresholdResult best_threshold(const std::vector<double>& probs,
                               const std::vector<int>& labels,
                               const ThresholdGrid& grid = {});

double tune_global_threshold(const std::vector<double>& probs,
                             const std::vector<int>& labels,
                             const ThresholdGrid& grid = {});

struct LeafSample {
  double prob = 0.0;
  int label = 0;
  std::string leaf;
};

// Leaves with at least `min_leaf_support` samples get their own threshold;
// the global threshold is tuned over all samples. `workers` > 1 spreads the
// per-leaf searches over threads without changing the result.
CalibrationTable tune_leaf_thresholds(const std::vector<LeafSample>& samples,
                                      const ThresholdGrid& grid = {},
                                      std::size_t min_leaf_support = kDefaultMinLeafSupport,
                                      unsigned workers = 1);

struct Scored {
  double prob = 0.0;
  std::optional<std::string> leaf;
};

std::vector<int> apply_calibration(const std::vector<Scored>& preds,
                                   const CalibrationTable& table);

struct HybridSample {
  double p_model = 0.0;
  double jaccard = 0.0;
  double containment = 0.0;
  int label = 0;
};

struct HybridResult {
  lexical::HybridWeights weights;
  double threshold = 0.0;
  double f1 = 0.0;
};

// Exhaustive search over weight triples on a `weight_step` simplex lattice
// and over grid thresholds. Ties prefer higher w_p, then lower threshold,
// then higher w_j.
HybridResult tune_hybrid_weights(const std::vector<HybridSample>& val,
                                 const ThresholdGrid& grid = {},
                                 double weight_step = 0.05);

}  // namespace relforge::calibrate
