#include "relforge/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>

#include "relforge/error.hpp"

namespace relforge::calibrate {

namespace {

constexpr double kGridTolerance = 1e-9;

double round9(double x) { return std::round(x * 1e9) / 1e9; }

// F1 kept as the exact fraction 2tp / (2tp + fp + fn) so ties are exact.
struct F1Ratio {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

F1Ratio f1_ratio(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
  const std::uint64_t den = 2 * tp + fp + fn;
  if (den == 0) return {0, 1};
  return {2 * tp, den};
}

// -1, 0, 1 as a < b, a == b, a > b.
int compare(const F1Ratio& a, const F1Ratio& b) {
  const auto l = static_cast<unsigned __int128>(a.num) * b.den;
  const auto r = static_cast<unsigned __int128>(b.num) * a.den;
  return l < r ? -1 : (l > r ? 1 : 0);
}

void check_prob(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("probability must be in [0, 1], got " + std::to_string(p));
  }
}

void check_label(int y) {
  if (y != 0 && y != 1) throw ValidationError("labels must be 0 or 1");
}

struct Best {
  std::size_t index = 0;
  F1Ratio f1;
};

// `scores` already validated. Points ascending, so strict improvement keeps
// the smallest threshold among ties.
Best search(const std::vector<double>& scores, const std::vector<int>& labels,
            const std::vector<double>& points) {
  Best best;
  bool first = true;
  for (std::size_t g = 0; g < points.size(); ++g) {
    const double t = points[g];
    std::uint64_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const bool pos = scores[i] >= t;
      if (labels[i] == 1) {
        pos ? ++tp : ++fn;
      } else if (pos) {
        ++fp;
      }
    }
    const F1Ratio f = f1_ratio(tp, fp, fn);
    if (first || compare(f, best.f1) > 0) {
      best = {g, f};
      first = false;
    }
  }
  return best;
}

void check_inputs(const std::vector<double>& probs, const std::vector<int>& labels) {
  if (probs.empty()) throw ValidationError("threshold search over an empty set");
  if (probs.size() != labels.size()) {
    throw ValidationError("probability/label length mismatch");
  }
  for (double p : probs) check_prob(p);
  for (int y : labels) check_label(y);
}

}  // namespace

void ThresholdGrid::validate() const {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(step)) {
    throw ValidationError("threshold grid bounds must be finite");
  }
  if (lo > hi) throw ValidationError("threshold grid has lo > hi");
  if (!(step > 0.0)) throw ValidationError("threshold grid step must be positive");
  const double k = (hi - lo) / step;
  if (std::abs(k - std::round(k)) > kGridTolerance) {
    throw ValidationError("threshold grid span is not a multiple of the step");
  }
}

std::vector<double> ThresholdGrid::points() const {
  validate();
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step));
  std::vector<double> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out.push_back(round9(lo + static_cast<double>(i) * step));
  return out;
}

bool ThresholdGrid::contains(double t) const {
  if (!std::isfinite(t)) return false;
  const double k = (t - lo) / step;
  const double r = std::round(k);
  const double n = std::round((hi - lo) / step);
  return std::abs(k - r) <= kGridTolerance && r >= 0 && r <= n;
}

int decide(double prob, double threshold) { return prob >= threshold ? 1 : 0; }

ThresholdResult best_threshold(const std::vector<double>& probs,
                               const std::vector<int>& labels,
                               const ThresholdGrid& grid) {
  check_inputs(probs, labels);
  const auto points = grid.points();
  const Best b = search(probs, labels, points);
  return {points[b.index], b.f1.value()};
}

double tune_global_threshold(const std::vector<double>& probs,
                             const std::vector<int>& labels,
                             const ThresholdGrid& grid) {
  return best_threshold(probs, labels, grid).threshold;
}

CalibrationTable tune_leaf_thresholds(const std::vector<LeafSample>& samples,
                                      const ThresholdGrid& grid,
                                      std::size_t min_leaf_support,
                                      unsigned workers) {
  if (samples.empty()) throw ValidationError("leaf calibration over an empty set");
  const auto points = grid.points();

  std::map<std::string, std::pair<std::vector<double>, std::vector<int>>> by_leaf;
  std::vector<double> all_probs;
  std::vector<int> all_labels;
  all_probs.reserve(samples.size());
  all_labels.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.leaf.empty()) throw ValidationError("leaf name must not be empty");
    check_prob(s.prob);
    check_label(s.label);
    all_probs.push_back(s.prob);
    all_labels.push_back(s.label);
    auto& [p, y] = by_leaf[s.leaf];
    p.push_back(s.prob);
    y.push_back(s.label);
  }

  CalibrationTable table;
  table.grid = grid;
  table.min_leaf_support = min_leaf_support;
  table.global_threshold = points[search(all_probs, all_labels, points).index];

  std::vector<const std::string*> names;
  std::vector<const std::pair<std::vector<double>, std::vector<int>>*> data;
  for (const auto& [leaf, d] : by_leaf) {
    if (d.first.size() >= min_leaf_support) {
      names.push_back(&leaf);
      data.push_back(&d);
    }
  }
  std::vector<double> chosen(names.size());
  auto run = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < data.size(); i += stride) {
      chosen[i] = points[search(data[i]->first, data[i]->second, points).index];
    }
  };
  const std::size_t n_workers =
      std::max<std::size_t>(1, std::min<std::size_t>(workers, data.size()));
  if (n_workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(run, w, n_workers);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < names.size(); ++i) table.leaf_thresholds[*names[i]] = chosen[i];
  return table;
}

std::vector<int> apply_calibration(const std::vector<Scored>& preds,
                                   const CalibrationTable& table) {
  std::vector<int> out;
  out.reserve(preds.size());
  for (const auto& p : preds) out.push_back(decide(p.prob, table.threshold_for(p.leaf)));
  return out;
}

HybridResult tune_hybrid_weights(const std::vector<HybridSample>& val,
                                 const ThresholdGrid& grid, double weight_step) {
  if (val.empty()) throw ValidationError("hybrid weight search over an empty set");
  if (!(weight_step > 0.0 && weight_step <= 1.0)) {
    throw ValidationError("weight step must be in (0, 1]");
  }
  const double m_real = 1.0 / weight_step;
  const auto m = static_cast<int>(std::llround(m_real));
  if (std::abs(m_real - m) > kGridTolerance) {
    throw ValidationError("weight step must divide 1");
  }
  std::vector<int> labels;
  labels.reserve(val.size());
  for (const auto& s : val) {
    check_prob(s.p_model);
    check_prob(s.jaccard);
    check_prob(s.containment);
    check_label(s.label);
    labels.push_back(s.label);
  }
  const auto points = grid.points();

  struct Candidate {
    int ip, ij;
    std::size_t g;
    F1Ratio f1;
  };
  // True when `a` should replace `b`.
  auto better = [](const Candidate& a, const Candidate& b) {
    if (const int c = compare(a.f1, b.f1); c != 0) return c > 0;
    if (a.ip != b.ip) return a.ip > b.ip;
    if (a.g != b.g) return a.g < b.g;
    return a.ij > b.ij;
  };

  std::optional<Candidate> best;
  std::vector<double> scores(val.size());
  for (int ip = m; ip >= 0; --ip) {
    for (int ij = m - ip; ij >= 0; --ij) {
      const lexical::HybridWeights w{static_cast<double>(ip) / m,
                                     static_cast<double>(ij) / m,
                                     static_cast<double>(m - ip - ij) / m};
      for (std::size_t i = 0; i < val.size(); ++i) {
        scores[i] = lexical::hybrid_score(val[i].p_model, val[i].jaccard,
                                          val[i].containment, w);
      }
      const Best b = search(scores, labels, points);
      const Candidate c{ip, ij, b.index, b.f1};
      if (!best || better(c, *best)) best = c;
    }
  }
  HybridResult out;
  out.weights = {static_cast<double>(best->ip) / m, static_cast<double>(best->ij) / m,
                 static_cast<double>(m - best->ip - best->ij) / m};
  out.threshold = points[best->g];
  out.f1 = best->f1.value();
  return out;
}

double CalibrationTable::threshold_for(const std::optional<std::string>& leaf) const {
  if (leaf) {
    if (auto it = leaf_thresholds.find(*leaf); it != leaf_thresholds.end()) return it->second;
  }
  return global_threshold;
}

void CalibrationTable::validate() const {
  grid.validate();
  if (!grid.contains(global_threshold)) {
    throw ValidationError("global threshold " + std::to_string(global_threshold) +
                          " is not a grid point");
  }
  for (const auto& [leaf, t] : leaf_thresholds) {
    if (leaf.empty()) throw ValidationError("leaf threshold with an empty key");
    if (!grid.contains(t)) {
      throw ValidationError("threshold for leaf '" + leaf + "' is not a grid point");
    }
  }
  hybrid_weights.validate();
}

nlohmann::ordered_json CalibrationTable::to_json() const {
  nlohmann::ordered_json j;
  j["grid"] = {{"lo", grid.lo}, {"hi", grid.hi}, {"step", grid.step}};
  j["global_threshold"] = global_threshold;
  j["min_leaf_support"] = min_leaf_support;
  nlohmann::ordered_json leaves = nlohmann::ordered_json::object();
  for (const auto& [leaf, t] : leaf_thresholds) leaves[leaf] = t;
  j["leaf_thresholds"] = std::move(leaves);
  j["hybrid_weights"] = {{"w_p", hybrid_weights.w_p},
                         {"w_j", hybrid_weights.w_j},
                         {"w_c", hybrid_weights.w_c}};
  return j;
}

CalibrationTable CalibrationTable::from_json(const nlohmann::json& j) {
  CalibrationTable t;
  try {
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      t.grid = {g.at("lo").get<double>(), g.at("hi").get<double>(),
                g.at("step").get<double>()};
    }
    t.global_threshold = j.at("global_threshold").get<double>();
    if (j.contains("min_leaf_support")) {
      t.min_leaf_support = j.at("min_leaf_support").get<std::size_t>();
    }
    if (j.contains("leaf_thresholds")) {
      for (const auto& [leaf, v] : j.at("leaf_thresholds").items()) {
        t.leaf_thresholds[leaf] = v.get<double>();
      }
    }
    if (j.contains("hybrid_weights")) {
      const auto& w = j.at("hybrid_weights");
      t.hybrid_weights = {w.at("w_p").get<double>(), w.at("w_j").get<double>(),
                          w.at("w_c").get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(DataErrorKind::kParse, std::string("calibration table: ") + e.what());
  }
  t.validate();
  return t;
}

}  // namespace relforge::calibrate
