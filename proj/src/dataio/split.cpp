#include <cmath>
#include <map>

#include "relforge/dataio.hpp"
#include "relforge/rng.hpp"

namespace relforge::dataio {

Split split_validation(const std::vector<Record>& records, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw ValidationError("split ratio must lie in (0, 1)");
  std::map<std::string, std::vector<std::size_t>> by_lang;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].label) {
      throw ValidationError("split_validation needs labeled records; '" + records[i].id +
                            "' has no label");
    }
    by_lang[records[i].language].push_back(i);
  }

  Split out;
  std::vector<char> to_train(records.size(), 0);
  Rng rng(seed);
  for (auto& [lang, idx] : by_lang) {
    if (idx.size() < 2) {
      out.warnings.push_back("language '" + lang + "' has " + std::to_string(idx.size()) +
                             " record(s); all assigned to train");
      for (auto i : idx) to_train[i] = 1;
      continue;
    }
    rng.shuffle(idx);
    const auto k = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(idx.size()) + 1e-9));
    for (std::size_t j = 0; j < k; ++j) to_train[idx[j]] = 1;
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    (to_train[i] ? out.train : out.val).push_back(records[i]);
  }
  return out;
}

}  // namespace relforge::dataio
