#include "relforge/metrics.hpp"

#include "relforge/error.hpp"

namespace relforge::metrics {

Confusion& Confusion::operator+=(const Confusion& o) noexcept {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

namespace {

void count(Confusion& c, int p, int g) {
  if ((p != 0 && p != 1) || (g != 0 && g != 1)) {
    throw ValidationError("labels must be 0 or 1");
  }
  if (p == 1) {
    ++(g == 1 ? c.tp : c.fp);
  } else {
    ++(g == 1 ? c.fn : c.tn);
  }
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a == 0) throw ValidationError("confusion over an empty list");
  if (a != b) {
    throw ValidationError("prediction/gold length mismatch: " + std::to_string(a) +
                          " vs " + std::to_string(b));
  }
}

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Confusion confusion(const std::vector<int>& pred, const std::vector<int>& gold) {
  check_lengths(pred.size(), gold.size());
  Confusion c;
  for (std::size_t i = 0; i < pred.size(); ++i) count(c, pred[i], gold[i]);
  return c;
}

double f1_positive(const Confusion& c) noexcept {
  return ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
}

double precision(const Confusion& c) noexcept { return ratio(c.tp, c.tp + c.fp); }

double recall(const Confusion& c) noexcept { return ratio(c.tp, c.tp + c.fn); }

double competition_score(double qc_f1, double qi_f1) {
  if (!(qc_f1 >= 0.0 && qc_f1 <= 1.0) || !(qi_f1 >= 0.0 && qi_f1 <= 1.0)) {
    throw ValidationError("F1 scores must be in [0, 1]");
  }
  return (qc_f1 + qi_f1) / 2.0;
}

Report evaluate(const std::vector<int>& pred, const std::vector<int>& gold,
                const std::vector<std::string>& languages) {
  check_lengths(pred.size(), gold.size());
  if (!languages.empty() && languages.size() != pred.size()) {
    throw ValidationError("language list length mismatch");
  }
  Report r;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    count(r.overall, pred[i], gold[i]);
    if (!languages.empty()) count(r.by_language[languages[i]], pred[i], gold[i]);
  }
  return r;
}

nlohmann::ordered_json to_json(const Confusion& c) {
  nlohmann::ordered_json j;
  j["precision"] = precision(c);
  j["recall"] = recall(c);
  j["f1_positive"] = f1_positive(c);
  j["support_pos"] = c.tp + c.fn;
  j["support_neg"] = c.fp + c.tn;
  j["confusion"] = {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
  return j;
}

nlohmann::ordered_json to_json(const Report& r) {
  nlohmann::ordered_json j = to_json(r.overall);
  if (!r.by_language.empty()) {
    nlohmann::ordered_json langs = nlohmann::ordered_json::object();
    for (const auto& [lang, c] : r.by_language) langs[lang] = to_json(c);
    j["by_language"] = std::move(langs);
  }
  return j;
}

}  // namespace relforge::metrics
