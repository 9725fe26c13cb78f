#include "support/calib_oracle.hpp"

#include <algorithm>
#include <string>

namespace relforge::testing {

std::vector<double> oracle_grid() {
  std::vector<double> g;
  for (int i = 15; i <= 35; ++i) g.push_back(i / 50.0);
  return g;
}

double oracle_f1(const std::vector<double>& p, const std::vector<int>& y, double t) {
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool pos = p[i] >= t;
    tp += pos && y[i] == 1;
    fp += pos && y[i] == 0;
    fn += !pos && y[i] == 1;
  }
  return 2 * tp + fp + fn == 0 ? 0.0 : double(2 * tp) / double(2 * tp + fp + fn);
}

double oracle_threshold(const std::vector<double>& p, const std::vector<int>& y) {
  double best_t = 0, best_f = -1;
  for (double t : oracle_grid()) {
    const double f = oracle_f1(p, y, t);
    if (f > best_f) best_t = t, best_f = f;
  }
  return best_t;
}

std::vector<calibrate::LeafSample> random_leaf_instance(std::mt19937_64& rng) {
  std::vector<calibrate::LeafSample> samples;
  const int leaves = 1 + static_cast<int>(rng() % 10);
  const int n = 1 + static_cast<int>(rng() % 1000);
  std::vector<double> bias(leaves);
  for (auto& b : bias) b = std::uniform_real_distribution<double>(-0.2, 0.2)(rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    // Skew leaf sizes so some fall under the support cutoff.
    const int leaf = static_cast<int>(std::min<double>(leaves - 1, leaves * u(rng) * u(rng)));
    const int label = u(rng) < 0.4 ? 1 : 0;
    double p = std::clamp(0.5 + (label ? 0.15 : -0.15) + bias[leaf] +
                              std::normal_distribution<double>(0, 0.2)(rng),
                          0.0, 1.0);
    if (rng() % 5 == 0) p = (15 + static_cast<int>(rng() % 21)) / 50.0;  // exact grid hits
    samples.push_back({p, label, "leaf" + std::to_string(leaf)});
  }
  return samples;
}

}  // namespace relforge::testing
