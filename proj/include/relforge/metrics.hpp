#pragma once

// Positive-class F1 and the two-task competition score.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace relforge::metrics {

struct Confusion {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const noexcept { return tp + fp + fn + tn; }
  Confusion& operator+=(const Confusion& o) noexcept;
  bool operator==(const Confusion&) const = default;
};

// Class 1 is positive. Throws ValidationError on empty input, length
// mismatch or a value other than 0/1.
Confusion confusion(const std::vector<int>& pred, const std::vector<int>& gold);

// 0 when there is no predicted and no actual positive.
double f1_positive(const Confusion& c) noexcept;
double precision(const Confusion& c) noexcept;
double recall(const Confusion& c) noexcept;

double competition_score(double qc_f1, double qi_f1);

struct Report {
  Confusion overall;
  std::map<std::string, Confusion> by_language;
};

// `languages` may be empty (no breakdown) or parallel to pred/gold.
Report evaluate(const std::vector<int>& pred, const std::vector<int>& gold,
                const std::vector<std::string>& languages = {});

nlohmann::ordered_json to_json(const Confusion& c);
nlohmann::ordered_json to_json(const Report& r);

}  // namespace relforge::metrics
