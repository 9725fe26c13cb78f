#include <algorithm>
#include <fstream>

#include "relforge/error.hpp"
#include "relforge/textnorm.hpp"
#include "textnorm/rules.hpp"
#include "unicode.hpp"

namespace relforge::textnorm {

namespace {

constexpr std::array<std::string_view, kRuleCount> kRuleNames = {
    "to_lower",          "clean_contractions",
    "remove_control_chars", "symbol_cleanup",
    "fractions_to_decimals", "nfkc",
    "range_mul",         "percent_temp",
    "model_names",       "number_unit",
    "thousand_separators", "remove_emoji",
    "squeeze_repeats",   "trim_underscores",
    "dedupe_tokens",     "remove_promo",
};

bool is_lowercase(const std::string& s) {
  const auto text = unicode::decode_utf8(s);
  return unicode::to_lower(text) == text;
}

std::vector<NormConfig::Phrase> compile_map(
    const std::map<std::string, std::string>& m, std::string_view what) {
  std::vector<NormConfig::Phrase> out;
  for (const auto& [from, to] : m) {
    if (from.empty()) {
      throw ValidationError(std::string(what) + ": empty key");
    }
    if (!is_lowercase(from)) {
      throw ValidationError(std::string(what) + ": key '" + from +
                            "' is not lowercase");
    }
    out.push_back({unicode::decode_utf8(from), unicode::decode_utf8(to)});
  }
  // Longest key first; ties by key so the order never depends on insertion.
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.from.size() > b.from.size();
  });
  return out;
}

std::vector<std::u32string> compile_list(const std::vector<std::string>& v) {
  std::vector<std::u32string> out;
  for (const auto& s : v) out.push_back(unicode::decode_utf8(s));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() > b.size();
  });
  return out;
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("normalization config: bad '") + key +
                          "': " + e.what());
  }
}

}  // namespace

std::string_view rule_name(RuleId rule) {
  return kRuleNames.at(static_cast<std::size_t>(rule));
}

std::optional<RuleId> rule_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kRuleCount; ++i) {
    if (kRuleNames[i] == name) return static_cast<RuleId>(i);
  }
  return std::nullopt;
}

RuleGroup group_of(RuleId rule) {
  switch (rule) {
    case RuleId::kToLower:
    case RuleId::kCleanContractions:
    case RuleId::kRemoveControlChars:
      return RuleGroup::kBasic;
    case RuleId::kSymbolCleanup:
    case RuleId::kFractionsToDecimals:
    case RuleId::kNfkc:
    case RuleId::kRangeMul:
    case RuleId::kPercentTemp:
      return RuleGroup::kSymbol;
    case RuleId::kModelNames:
    case RuleId::kNumberUnit:
    case RuleId::kThousandSeparators:
      return RuleGroup::kEntity;
    default:
      return RuleGroup::kNoise;
  }
}

NormSettings NormSettings::defaults() {
  NormSettings s;
  s.enabled_rules.assign(kCanonicalOrder.begin(), kCanonicalOrder.end());
  s.contractions = {
      {"it's", "it is"},       {"don't", "do not"},
      {"can't", "cannot"},     {"won't", "will not"},
      {"i'm", "i am"},         {"you're", "you are"},
      {"they're", "they are"}, {"isn't", "is not"},
      {"aren't", "are not"},   {"wasn't", "was not"},
      {"weren't", "were not"}, {"doesn't", "does not"},
      {"didn't", "did not"},   {"couldn't", "could not"},
      {"shouldn't", "should not"}, {"wouldn't", "would not"},
      {"let's", "let us"},     {"that's", "that is"},
      {"what's", "what is"},   {"it'll", "it will"},
  };
  s.model_aliases = {
      {"i-phone", "iphone"},   {"i phone", "iphone"},
      {"i-pad", "ipad"},       {"i pad", "ipad"},
      {"mac book", "macbook"}, {"air pods", "airpods"},
      {"x-box", "xbox"},       {"play station", "playstation"},
  };
  s.units = {"gb", "mb",  "tb", "kb", "mah", "ml",  "l",   "kg",
             "g",  "mg",  "cm", "mm", "m",   "km",  "inch", "w",
             "kw", "v",   "hz", "ghz", "mhz"};
  s.promo_phrases = {"free shipping", "best seller", "hot sale",
                     "flash sale", "limited time offer", "new arrival"};
  s.promo_enabled = false;
  return s;
}

NormConfig::NormConfig() : NormConfig(NormSettings::defaults()) {}

NormConfig::NormConfig(NormSettings settings) : settings_(std::move(settings)) {
  std::size_t last = 0;
  bool first = true;
  for (RuleId rule : settings_.enabled_rules) {
    const auto idx = static_cast<std::size_t>(
        std::find(kCanonicalOrder.begin(), kCanonicalOrder.end(), rule) -
        kCanonicalOrder.begin());
    if (idx >= kRuleCount) {
      throw ValidationError("enabled_rules: unknown rule id");
    }
    if (!first && idx <= last) {
      throw ValidationError(
          "enabled_rules must follow the canonical order without repeats; '" +
          std::string(rule_name(rule)) + "' is out of place");
    }
    enabled_[static_cast<std::size_t>(rule)] = true;
    last = idx;
    first = false;
  }

  contractions_ = compile_map(settings_.contractions, "contractions");
  aliases_ = compile_map(settings_.model_aliases, "model_aliases");

  for (const auto& unit : settings_.units) {
    if (unit.empty()) throw ValidationError("units: empty unit");
    if (!is_lowercase(unit)) {
      throw ValidationError("units: '" + unit + "' is not lowercase");
    }
    for (char32_t c : unicode::decode_utf8(unit)) {
      if (unicode::is_digit(c) || unicode::is_whitespace(c)) {
        throw ValidationError("units: '" + unit +
                              "' contains a digit or whitespace");
      }
    }
  }
  units_ = compile_list({settings_.units.begin(), settings_.units.end()});

  for (const auto& phrase : settings_.promo_phrases) {
    if (phrase.empty() || !is_lowercase(phrase)) {
      throw ValidationError("promo_phrases: '" + phrase +
                            "' must be non-empty and lowercase");
    }
  }
  promos_ = compile_list(settings_.promo_phrases);

  // A canonical name that is itself rewritten would never settle.
  for (const auto& alias : aliases_) {
    if (detail::model_names(alias.to, aliases_) != alias.to) {
      throw ValidationError("model_aliases: canonical name '" +
                            unicode::encode_utf8(alias.to) +
                            "' is rewritten by another alias");
    }
  }
}

bool NormConfig::active(RuleId rule) const noexcept {
  if (!enabled(rule)) return false;
  return rule != RuleId::kRemovePromo || settings_.promo_enabled;
}

NormConfig NormConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw ValidationError("normalization config must be a JSON object");
  }
  NormSettings s = NormSettings::defaults();
  s.contractions = get_or(j, "contractions", s.contractions);
  s.model_aliases = get_or(j, "model_aliases", s.model_aliases);
  s.units = get_or(j, "units", s.units);
  s.promo_phrases = get_or(j, "promo_phrases", s.promo_phrases);
  s.promo_enabled = get_or(j, "promo_enabled", s.promo_enabled);
  if (j.contains("enabled_rules")) {
    s.enabled_rules.clear();
    for (const auto& name : get_or<std::vector<std::string>>(j, "enabled_rules", {})) {
      const auto rule = rule_from_name(name);
      if (!rule) throw ValidationError("enabled_rules: unknown rule '" + name + "'");
      s.enabled_rules.push_back(*rule);
    }
  }
  return NormConfig(std::move(s));
}

NormConfig NormConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError(DataErrorKind::kIo,
                    "cannot open normalization config " + path.string());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(DataErrorKind::kParse,
                    "normalization config " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json NormConfig::to_json() const {
  nlohmann::json rules = nlohmann::json::array();
  for (RuleId r : settings_.enabled_rules) rules.push_back(rule_name(r));
  return {
      {"enabled_rules", rules},
      {"contractions", settings_.contractions},
      {"model_aliases", settings_.model_aliases},
      {"units", settings_.units},
      {"promo_phrases", settings_.promo_phrases},
      {"promo_enabled", settings_.promo_enabled},
  };
}

void NormStats::merge(const NormStats& other) {
  for (std::size_t i = 0; i < kRuleCount; ++i) changed[i] += other.changed[i];
}

nlohmann::json NormStats::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (RuleId r : kCanonicalOrder) {
    j[std::string(rule_name(r))] = changed[static_cast<std::size_t>(r)];
  }
  return j;
}

}  // namespace relforge::textnorm
